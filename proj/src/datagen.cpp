#include "ngbmp/datagen.hpp"

#include <cmath>
#include <limits>

#include "ngbmp/rng.hpp"

namespace ngbmp {

void SignalModel::validate() const {
  switch (kind) {
    case Kind::gaussian_iid:
      if (!(var > 0.0)) throw DomainError("SignalModel: var must be positive");
      break;
    case Kind::uniform_noniid:
      if (!(mu_lo <= mu_hi)) throw DomainError("SignalModel: mu range reversed");
      if (!(var_lo > 0.0) || !(var_lo <= var_hi))
        throw DomainError("SignalModel: var range must be positive and ordered");
      break;
    case Kind::custom_amplitudes:
      if (amplitudes.empty()) throw DomainError("SignalModel: no custom amplitudes");
      break;
  }
}

MatrixXcd gen_matrix(int m, int n, uint64_t seed, bool real_valued) {
  if (m < 1 || n < 1) throw DomainError("gen_matrix: dimensions must be positive");
  Rng rng(seed);
  MatrixXcd phi(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i)
      phi(i, j) = real_valued ? Complex(rng.gaussian(), 0.0) : rng.cgaussian();
    const double norm = phi.col(j).norm();
    if (norm < 1e-150) throw ZeroColumnError("gen_matrix: degenerate column draw");
    phi.col(j) /= norm;
  }
  return phi;
}

SparseSignal gen_signal(int n, double p, const SignalModel& model, uint64_t seed) {
  if (n < 1) throw DomainError("gen_signal: n must be positive");
  if (!(p >= 0.0) || !(p < 1.0)) throw DomainError("gen_signal: p outside [0,1)");
  model.validate();

  Rng rng(seed);
  std::vector<uint8_t> active(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) active[static_cast<size_t>(j)] = rng.bernoulli(p) ? 1 : 0;

  VectorXcd x = VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (!active[static_cast<size_t>(j)]) continue;
    double amp = 0.0;
    switch (model.kind) {
      case SignalModel::Kind::gaussian_iid:
        amp = model.mu + std::sqrt(model.var) * rng.gaussian();
        break;
      case SignalModel::Kind::uniform_noniid: {
        const double mu_j = rng.uniform(model.mu_lo, model.mu_hi);
        const double var_j = rng.uniform(model.var_lo, model.var_hi);
        const double half = std::sqrt(3.0 * var_j);
        amp = rng.uniform(mu_j - half, mu_j + half);
        break;
      }
      case SignalModel::Kind::custom_amplitudes:
        amp = model.amplitudes[static_cast<size_t>(j) % model.amplitudes.size()];
        break;
    }
    x(j) = Complex(amp, 0.0);
  }
  return SparseSignal::from_values(std::move(x));
}

NoisyObservation add_noise(const VectorXcd& clean, double snr_db, uint64_t seed,
                           bool real_valued) {
  const int m = static_cast<int>(clean.size());
  if (m < 1) throw DomainError("add_noise: empty observation");
  const double energy = clean.squaredNorm();
  const double floor =
      std::max(1e-12 * energy / static_cast<double>(m), std::numeric_limits<double>::min());

  if (std::isinf(snr_db) && snr_db > 0.0)
    return NoisyObservation{clean, floor};
  if (!std::isfinite(snr_db)) throw DomainError("add_noise: snr_db must be finite or +inf");
  if (energy == 0.0) throw DomainError("add_noise: zero clean signal at finite snr");

  const double sigma2 = energy / (m * std::pow(10.0, snr_db / 10.0));
  const double scale = std::sqrt(sigma2);
  Rng rng(seed);
  VectorXcd y(m);
  for (int i = 0; i < m; ++i) {
    const Complex noise =
        real_valued ? Complex(scale * rng.gaussian(), 0.0) : scale * rng.cgaussian();
    y(i) = clean(i) + noise;
  }
  return NoisyObservation{std::move(y), sigma2};
}

}  // namespace ngbmp
