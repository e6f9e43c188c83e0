#include "ngbmp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ngbmp/model.hpp"

namespace ngbmp {

VectorXd posterior_weights(const DominantSet& dominant) {
  if (dominant.empty()) throw EmptySetError("posterior_weights: no supports");
  const auto& entries = dominant.entries();
  double nu_max = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries) nu_max = std::max(nu_max, e.nu);

  VectorXd w(dominant.size());
  for (int k = 0; k < dominant.size(); ++k)
    w(k) = std::exp(entries[static_cast<size_t>(k)].nu - nu_max);
  return w / w.sum();
}

VectorXcd ammse_estimate(const ProblemInstance& inst, const DominantSet& dominant,
                         int* dropped_out) {
  VectorXd w = posterior_weights(dominant);
  const auto& entries = dominant.entries();

  VectorXcd x = VectorXcd::Zero(inst.n());
  double kept_mass = 0.0;
  int dropped = 0;
  for (int k = 0; k < dominant.size(); ++k) {
    const SupportSet& s = entries[static_cast<size_t>(k)].support;
    try {
      const VectorXcd coef = blue_estimate(inst.phi, inst.y, s);
      x += w(k) * embed(coef, s, inst.n());
      kept_mass += w(k);
    } catch (const RankDeficientError&) {
      ++dropped;  // degenerate support: drop it and renormalize below
    }
  }
  if (dropped_out) *dropped_out = dropped;
  if (kept_mass <= 0.0)
    throw RankDeficientError("ammse_estimate: every dominant support was degenerate");
  return x / kept_mass;
}

namespace {

// Strict "better" order on (nu, support): larger nu, then smaller support,
// then lexicographically smaller index list.
bool better_entry(const DominantEntry& a, const DominantEntry& b) {
  if (a.nu != b.nu) return a.nu > b.nu;
  if (a.support.size() != b.support.size()) return a.support.size() < b.support.size();
  return a.support < b.support;
}

}  // namespace

MapEstimate map_estimate(const ProblemInstance& inst, const DominantSet& dominant) {
  if (dominant.empty()) throw EmptySetError("map_estimate: no supports");
  std::vector<const DominantEntry*> ranked;
  ranked.reserve(static_cast<size_t>(dominant.size()));
  for (const auto& e : dominant.entries()) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(),
            [](const DominantEntry* a, const DominantEntry* b) { return better_entry(*a, *b); });

  for (const DominantEntry* e : ranked) {
    try {
      const VectorXcd coef = blue_estimate(inst.phi, inst.y, e->support);
      return MapEstimate{e->support, embed(coef, e->support, inst.n())};
    } catch (const RankDeficientError&) {
      // fall through to the next-ranked support
    }
  }
  throw RankDeficientError("map_estimate: every dominant support was degenerate");
}

namespace {

double clamp_rate(double p, int n) {
  return std::clamp(p, 1.0 / static_cast<double>(n), 0.5);
}

int chain_depth(const PrecomputeCache& cache, double p, const RecoverOptions& opt) {
  const int cap = std::min(cache.m(), cache.n());
  const int depth =
      opt.max_support ? *opt.max_support : compute_support_budget(cache.n(), p, opt.tail_prob);
  return std::max(1, std::min(depth, cap));
}

SearchConfig make_config(int depth, const RecoverOptions& opt) {
  SearchConfig cfg;
  cfg.max_support = depth;
  cfg.passes = opt.passes;
  cfg.tail_prob = opt.tail_prob;
  cfg.eps_schur_rel = opt.eps_schur_rel;
  return cfg;
}

RecoveryResult assemble(const PrecomputeCache& cache, double p, double sigma2,
                        const RecoverOptions& opt) {
  ProblemInstance inst(cache.phi(), cache.y(), sigma2, p);
  RecoveryResult out;
  out.dominant = repeated_search(inst, cache, make_config(chain_depth(cache, p, opt), opt));
  out.weights = posterior_weights(out.dominant);
  out.x_ammse = ammse_estimate(inst, out.dominant, &out.dropped_supports);
  MapEstimate map = map_estimate(inst, out.dominant);
  out.s_map = std::move(map.support);
  out.x_map = std::move(map.x);
  out.p_hat = p;
  out.sigma2_hat = sigma2;
  return out;
}

}  // namespace

HyperEstimate estimate_hyperparameters(const PrecomputeCache& cache, double p_init,
                                       const RecoverOptions& opt) {
  const int n = cache.n();
  const int m = cache.m();
  // Per-level selection is independent of the noise variance, so iteration
  // runs with a unit placeholder until the final residual-based estimate.
  const double placeholder = 1.0;

  HyperEstimate est;
  double p_hat = clamp_rate(p_init, n);
  bool converged = false;
  int used = 0;
  for (int it = 1; it <= opt.max_bootstrap_iter; ++it) {
    used = it;
    est.last = assemble(cache, p_hat, placeholder, opt);
    const double p_next = clamp_rate(
        static_cast<double>(est.last.s_map.size()) / static_cast<double>(n), n);
    const double rel = std::abs(p_next - p_hat) / p_hat;
    p_hat = p_next;
    if (rel < opt.bootstrap_rel_tol) {
      converged = true;
      break;
    }
  }

  // Mean-removed residual variance of the final MAP fit, floored so that a
  // perfect fit still leaves a usable positive variance.
  const VectorXcd resid = cache.y() - cache.phi() * est.last.x_map;
  const Complex mean = resid.sum() / static_cast<double>(m);
  double sigma2 = (resid.array() - mean).matrix().squaredNorm() / static_cast<double>(m);
  const double floor = 1e-12 * cache.y_energy() / static_cast<double>(m);
  sigma2 = std::max(sigma2, std::max(floor, std::numeric_limits<double>::min()));

  est.p_hat = p_hat;
  est.sigma2_hat = sigma2;
  est.iterations = used;
  est.converged = converged;
  est.last.iterations = used;
  est.last.converged = converged;
  return est;
}

HyperEstimate estimate_hyperparameters(const MatrixXcd& phi, const VectorXcd& y,
                                       double p_init, const RecoverOptions& opt) {
  PrecomputeCache cache(phi, y);
  return estimate_hyperparameters(cache, p_init, opt);
}

RecoveryResult recover(const PrecomputeCache& cache, const RecoverOptions& opt) {
  if (opt.p && opt.sigma2) {
    RecoveryResult out = assemble(cache, *opt.p, *opt.sigma2, opt);
    out.iterations = 0;
    out.converged = true;
    return out;
  }
  // Unknown hyperparameters: bootstrap them, then run the final search with
  // the estimates (chain depth recomputed from p_hat inside assemble).
  const double p_start = opt.p ? *opt.p : opt.p_init;
  const HyperEstimate est = estimate_hyperparameters(cache, p_start, opt);
  RecoveryResult out = assemble(cache, est.p_hat, est.sigma2_hat, opt);
  out.iterations = est.iterations;
  out.converged = est.converged;
  return out;
}

RecoveryResult recover(const MatrixXcd& phi, const VectorXcd& y, const RecoverOptions& opt) {
  PrecomputeCache cache(phi, y);
  return recover(cache, opt);
}

}  // namespace ngbmp
