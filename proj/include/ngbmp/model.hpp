#ifndef NGBMP_MODEL_HPP
#define NGBMP_MODEL_HPP

#include <utility>
#include <vector>

#include "ngbmp/types.hpp"

namespace ngbmp {

// Relative pivot tolerance for the Gram solves below: a support is declared
// rank-deficient once the best remaining pivot drops under eps_rank times the
// largest initial Gram diagonal.
inline constexpr double kEpsRank = 1e-12;

// Least-squares (best linear unbiased) coefficients of y on the columns in s,
// i.e. the solution of (phi_s^H phi_s) c = phi_s^H y, ordered like s.
// An empty support yields an empty vector. Throws RankDeficientError when the
// Gram pivots collapse.
VectorXcd blue_estimate(const MatrixXcd& phi, const VectorXcd& y, const SupportSet& s);

// Energy of y left outside the span of the support columns:
// ||y||^2 - ||phi_s c||^2 with c from blue_estimate, clamped to >= 0.
// An empty support returns ||y||^2.
double residual_energy(const MatrixXcd& phi, const VectorXcd& y, const SupportSet& s);

// log of the Bernoulli support prior: card*log(p) + (n - card)*log(1 - p).
double log_support_prior(int card, double p, int n);

// Direct (non-recursive) selection metric of a support under the instance's
// noise level and activity rate:
//   nu(s) = -residual_energy / sigma2 + log_support_prior(|s|).
// This is the reference every fast path is tested against.
double metric_direct(const ProblemInstance& inst, const SupportSet& s);

// Aggregate normalized error over trials, in dB:
//   10*log10( (1/K) * sum_k ||xhat_k - x_k||^2 / ||x_k||^2 ).
// Throws DomainError for an empty list or a zero-norm reference signal;
// returns -infinity when every trial error is exactly zero.
double nmse_db(const std::vector<std::pair<VectorXcd, VectorXcd>>& truth_and_estimate);

}  // namespace ngbmp

#endif  // NGBMP_MODEL_HPP
