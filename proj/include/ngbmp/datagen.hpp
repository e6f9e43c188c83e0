#ifndef NGBMP_DATAGEN_HPP
#define NGBMP_DATAGEN_HPP

#include <cstdint>
#include <vector>

#include "ngbmp/types.hpp"

namespace ngbmp {

// Amplitude law for the active entries of a generated signal. Amplitudes are
// real-valued; the measurement model stays complex around them.
struct SignalModel {
  enum class Kind { gaussian_iid, uniform_noniid, custom_amplitudes };
  Kind kind = Kind::gaussian_iid;

  // gaussian_iid: every active amplitude ~ N(mu, var).
  double mu = 10.0;
  double var = 2.0;

  // uniform_noniid: each active index draws its own mean from [mu_lo, mu_hi]
  // and variance from [var_lo, var_hi], then an amplitude uniform on the
  // interval realizing that mean and variance (half-width sqrt(3*var)).
  double mu_lo = 5.0, mu_hi = 10.0;
  double var_lo = 1.0, var_hi = 2.0;

  // custom_amplitudes: active index j takes amplitudes[j % size].
  std::vector<double> amplitudes;

  void validate() const;
};

// M x N matrix with i.i.d. circular complex Gaussian entries (real Gaussian
// in real mode) and every column scaled to unit norm. Same seed, same matrix,
// bit for bit. Entries are drawn column by column.
MatrixXcd gen_matrix(int m, int n, uint64_t seed, bool real_valued = false);

// Bernoulli(p) activity mask with model-law amplitudes on the active indices.
// The mask is drawn for all indices first, then amplitudes in index order.
// p = 0 yields the zero signal.
SparseSignal gen_signal(int n, double p, const SignalModel& model, uint64_t seed);

struct NoisyObservation {
  VectorXcd y;
  double sigma2 = 0.0;  // per-entry total noise variance actually used
};

// Adds white noise calibrated against the realized clean energy:
//   sigma2 = ||clean||^2 / (m * 10^(snr_db/10)),
// complex circular by default, real in real mode. An infinite snr_db returns
// the clean vector with the variance floor 1e-12 * ||clean||^2 / m. A zero
// clean vector with finite snr is a DomainError.
NoisyObservation add_noise(const VectorXcd& clean, double snr_db, uint64_t seed,
                           bool real_valued = false);

}  // namespace ngbmp

#endif  // NGBMP_DATAGEN_HPP
