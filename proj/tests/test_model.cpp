#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <doctest.h>

#include "ngbmp/errors.hpp"
#include "ngbmp/model.hpp"
#include "ngbmp/types.hpp"
#include "oracles.hpp"

using namespace ngbmp;

namespace {

// Small deterministic complex matrix with unit-norm columns.
MatrixXcd random_matrix(int m, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd phi(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) phi(i, j) = Complex(g(rng), g(rng));
    phi.col(j) /= phi.col(j).norm();
  }
  return phi;
}

VectorXcd random_vector(int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXcd y(m);
  for (int i = 0; i < m; ++i) y(i) = Complex(g(rng), g(rng));
  return y;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("blue on a single unit column recovers the scale") {
  MatrixXcd phi(4, 1);
  phi << Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0);
  const VectorXcd y = 3.0 * phi.col(0);
  const VectorXcd c = blue_estimate(phi, y, SupportSet({0}));
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c(0) - Complex(3.0, 0.0)) < 1e-12);
}

TEST_CASE("blue on the empty support is an empty vector") {
  const MatrixXcd phi = random_matrix(4, 3, 11);
  const VectorXcd y = random_vector(4, 12);
  CHECK(blue_estimate(phi, y, SupportSet()).size() == 0);
}

TEST_CASE("blue rejects out-of-range indices and rank-deficient supports") {
  MatrixXcd phi = random_matrix(6, 3, 21);
  const VectorXcd y = random_vector(6, 22);
  CHECK_THROWS_AS(blue_estimate(phi, y, SupportSet({0, 3})), DomainError);
  phi.col(2) = phi.col(0);
  CHECK_THROWS_AS(blue_estimate(phi, y, SupportSet({0, 2})), RankDeficientError);
}

TEST_CASE("blue matches QR least squares on a generic overdetermined system") {
  const MatrixXcd phi = random_matrix(8, 4, 31);
  const VectorXcd y = random_vector(8, 32);
  const SupportSet s({0, 1, 2, 3});
  CHECK(oracles::close_vec(blue_estimate(phi, y, s), oracles::blue(phi, y, s), 1e-10));
}

TEST_CASE("blue output is real whenever the inputs are real") {
  MatrixXcd phi = random_matrix(8, 5, 41);
  VectorXcd y = random_vector(8, 42);
  phi = phi.real().cast<Complex>();
  y = y.real().cast<Complex>();
  const VectorXcd c = blue_estimate(phi, y, SupportSet({0, 2, 4}));
  CHECK(c.imag().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("residual energy: empty support, spanning support, projector oracle") {
  const MatrixXcd phi = random_matrix(6, 8, 51);
  const VectorXcd y = random_vector(6, 52);
  CHECK(residual_energy(phi, y, SupportSet()) == doctest::Approx(y.squaredNorm()));
  // Six independent columns span C^6, so nothing is left over.
  const SupportSet full({0, 1, 2, 3, 4, 5});
  CHECK(residual_energy(phi, y, full) < 1e-9 * y.squaredNorm());
  const SupportSet part({1, 4, 6});
  CHECK(oracles::close(residual_energy(phi, y, part),
                       oracles::residual_energy(phi, y, part), 1e-10));
}

TEST_CASE("residual energy satisfies the Pythagorean split") {
  const MatrixXcd phi = random_matrix(10, 16, 61);
  const VectorXcd y = random_vector(10, 62);
  const SupportSet s({2, 7, 11});
  const VectorXcd c = blue_estimate(phi, y, s);
  const double fitted = (submatrix(phi, s) * c).squaredNorm();
  CHECK(std::abs(residual_energy(phi, y, s) + fitted - y.squaredNorm()) <
        1e-9 * y.squaredNorm());
}

TEST_CASE("residual energy never grows when the support grows") {
  const MatrixXcd phi = random_matrix(12, 20, 71);
  const VectorXcd y = random_vector(12, 72);
  SupportSet s;
  double prev = residual_energy(phi, y, s);
  for (int i : {3, 8, 17, 1}) {
    s = s.with(i);
    const double cur = residual_energy(phi, y, s);
    CHECK(cur <= prev + 1e-9 * y.squaredNorm());
    prev = cur;
  }
}

TEST_CASE("support prior closed forms") {
  CHECK(log_support_prior(0, 0.01, 50) == doctest::Approx(50.0 * std::log(0.99)));
  // At p = 1/2 the prior is flat in the cardinality.
  CHECK(log_support_prior(3, 0.5, 10) == doctest::Approx(10.0 * std::log(0.5)));
  CHECK(log_support_prior(7, 0.5, 10) == doctest::Approx(10.0 * std::log(0.5)));
  const double want = 5.0 * std::log(0.005) + 1019.0 * std::log(0.995);
  CHECK(log_support_prior(5, 0.005, 1024) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("direct metric composes residual and prior") {
  const MatrixXcd phi = random_matrix(8, 12, 81);
  const VectorXcd y = random_vector(8, 82);
  const ProblemInstance inst(phi, y, 0.3, 0.07);
  const SupportSet empty;
  CHECK(metric_direct(inst, empty) ==
        doctest::Approx(-y.squaredNorm() / 0.3 + log_support_prior(0, 0.07, 12)));
  const SupportSet s({0, 5, 9});
  CHECK(metric_direct(inst, s) ==
        doctest::Approx(-residual_energy(phi, y, s) / inst.sigma2 +
                        log_support_prior(s.size(), inst.p, inst.n())));
  CHECK(oracles::close(metric_direct(inst, s), oracles::metric(inst, s), 1e-10));
}

TEST_CASE("metric ordering within a cardinality ignores the noise level") {
  const MatrixXcd phi = random_matrix(8, 10, 91);
  const VectorXcd y = random_vector(8, 92);
  const std::vector<SupportSet> pairs = {SupportSet({0, 1}), SupportSet({2, 3}),
                                         SupportSet({4, 7}), SupportSet({5, 9})};
  const ProblemInstance a(phi, y, 0.2, 0.1);
  const ProblemInstance b(phi, y, 5.0, 0.1);
  int best_a = 0, best_b = 0;
  for (int k = 1; k < static_cast<int>(pairs.size()); ++k) {
    if (metric_direct(a, pairs[k]) > metric_direct(a, pairs[best_a])) best_a = k;
    if (metric_direct(b, pairs[k]) > metric_direct(b, pairs[best_b])) best_b = k;
  }
  CHECK(best_a == best_b);
}

TEST_CASE("nmse aggregates per-trial ratios before taking the log") {
  const VectorXcd x = random_vector(6, 101);
  std::vector<std::pair<VectorXcd, VectorXcd>> trials;

  trials = {{x, 2.0 * x}};  // error equals the signal
  CHECK(nmse_db(trials) == doctest::Approx(0.0).epsilon(1e-12));

  trials = {{x, 1.1 * x}};  // ratio 0.01
  CHECK(nmse_db(trials) == doctest::Approx(-20.0).epsilon(1e-9));

  // Ratios 0.1 and 0.001 average to 0.0505.
  trials = {{x, (1.0 + std::sqrt(0.1)) * x}, {x, (1.0 + std::sqrt(0.001)) * x}};
  CHECK(nmse_db(trials) == doctest::Approx(10.0 * std::log10(0.0505)).epsilon(1e-9));
  CHECK(nmse_db(trials) == doctest::Approx(-12.967092).epsilon(1e-5));
}

TEST_CASE("nmse edge cases: perfect recovery, empty input, zero reference") {
  const VectorXcd x = random_vector(4, 111);
  std::vector<std::pair<VectorXcd, VectorXcd>> perfect = {{x, x}};
  CHECK(nmse_db(perfect) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(nmse_db({}), DomainError);
  std::vector<std::pair<VectorXcd, VectorXcd>> zero_ref = {
      {VectorXcd::Zero(4), x}};
  CHECK_THROWS_AS(nmse_db(zero_ref), DomainError);
}

}  // TEST_SUITE
