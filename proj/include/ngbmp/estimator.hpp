#ifndef NGBMP_ESTIMATOR_HPP
#define NGBMP_ESTIMATOR_HPP

#include <optional>

#include "ngbmp/search.hpp"
#include "ngbmp/types.hpp"

namespace ngbmp {

// Normalized posterior weights over the dominant supports: softmax of the nu
// values with max subtraction. Throws EmptySetError for an empty set.
VectorXd posterior_weights(const DominantSet& dominant);

// Posterior-weighted mixture of per-support least-squares estimates,
// embedded into length-n vectors. Supports whose Gram collapses are dropped
// and the remaining weights renormalized; the drop count lands in
// *dropped_out when given.
VectorXcd ammse_estimate(const ProblemInstance& inst, const DominantSet& dominant,
                         int* dropped_out = nullptr);

struct MapEstimate {
  SupportSet support;
  VectorXcd x;  // length n, zero off the support
};

// Support with the largest nu; ties prefer the smaller cardinality, then the
// lexicographically smaller index list.
MapEstimate map_estimate(const ProblemInstance& inst, const DominantSet& dominant);

struct RecoverOptions {
  std::optional<double> p;           // known activity rate
  std::optional<double> sigma2;      // known noise variance
  double p_init = 0.003;             // bootstrap starting rate when p unknown
  int passes = 5;                    // repeated-search passes D
  double tail_prob = 1e-3;           // tail mass behind the chain depth
  std::optional<int> max_support;    // explicit chain depth override
  int max_bootstrap_iter = 10;
  double bootstrap_rel_tol = 0.02;   // stop when p_hat moves less than this
  double eps_schur_rel = kEpsSchur;
};

struct RecoveryResult {
  VectorXcd x_ammse;
  VectorXcd x_map;
  SupportSet s_map;
  double p_hat = 0.0;
  double sigma2_hat = 0.0;
  int iterations = 0;       // bootstrap iterations used (0 = known parameters)
  bool converged = true;
  int dropped_supports = 0;
  DominantSet dominant;
  VectorXd weights;         // aligned with dominant.entries()
};

struct HyperEstimate {
  double p_hat = 0.0;
  double sigma2_hat = 0.0;
  int iterations = 0;
  bool converged = true;
  RecoveryResult last;  // final bootstrap iterate (placeholder-noise weights)
};

// Self-bootstrapped hyperparameters: alternate dominant search and MAP
// support selection, refitting p_hat = |s_map| / n each round, until p_hat
// moves less than bootstrap_rel_tol (relative) or max_bootstrap_iter rounds
// pass. The noise variance is held at 1.0 during iteration (per-level
// selection does not depend on it) and estimated at the end from the
// mean-removed MAP residual, floored at 1e-12 * ||y||^2 / m.
HyperEstimate estimate_hyperparameters(const MatrixXcd& phi, const VectorXcd& y,
                                       double p_init, const RecoverOptions& opt = {});

// Full pipeline: with both p and sigma2 supplied runs one dominant search
// and assembles the estimates; otherwise bootstraps the hyperparameters
// first, then runs the final search with (p_hat, sigma2_hat) and a chain
// depth recomputed from p_hat.
RecoveryResult recover(const MatrixXcd& phi, const VectorXcd& y,
                       const RecoverOptions& opt = {});

// As above but reusing an existing cache over the same (phi, y).
RecoveryResult recover(const PrecomputeCache& cache, const RecoverOptions& opt = {});
HyperEstimate estimate_hyperparameters(const PrecomputeCache& cache, double p_init,
                                       const RecoverOptions& opt = {});

}  // namespace ngbmp

#endif  // NGBMP_ESTIMATOR_HPP
