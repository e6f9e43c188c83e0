#include "ngbmp/search.hpp"

#include <cmath>
#include <limits>

#include "ngbmp/model.hpp"

namespace ngbmp {

double erfc_inv(double z) {
  if (!(z > 0.0) || !(z < 2.0)) throw DomainError("erfc_inv: argument outside (0,2)");
  if (z == 1.0) return 0.0;
  // erfc is strictly decreasing; bisect, exploiting erfc(-x) = 2 - erfc(x).
  const bool flip = z > 1.0;
  if (flip) z = 2.0 - z;
  double lo = 0.0, hi = 30.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid) > z ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return flip ? -x : x;
}

int compute_support_budget(int n, double p, double tail_prob) {
  if (n < 1) throw DomainError("compute_support_budget: n must be positive");
  if (!(p > 0.0) || !(p < 1.0)) throw DomainError("compute_support_budget: p outside (0,1)");
  if (!(tail_prob > 0.0) || !(tail_prob <= 0.5))
    throw DomainError("compute_support_budget: tail_prob outside (0, 0.5]");

  const double np = n * p;
  int budget;
  if (np > 5.0) {
    const double spread = std::sqrt(2.0 * np * (1.0 - p)) * erfc_inv(2.0 * tail_prob);
    budget = static_cast<int>(std::ceil(np + spread));
  } else {
    // Exact binomial: smallest P with CDF(P) >= 1 - tail_prob, term recurrence
    // t_{k+1} = t_k * (n-k)/(k+1) * p/(1-p).
    const double odds = p / (1.0 - p);
    double term = std::exp(n * std::log1p(-p));
    double cdf = term;
    int k = 0;
    while (cdf < 1.0 - tail_prob && k < n) {
      term *= (static_cast<double>(n - k) / static_cast<double>(k + 1)) * odds;
      ++k;
      cdf += term;
    }
    budget = k;
  }
  return std::max(1, std::min(budget, n));
}

namespace {

bool blocked(const std::vector<std::vector<uint8_t>>& forbidden, int level, int i) {
  return level < static_cast<int>(forbidden.size()) &&
         forbidden[static_cast<size_t>(level)][static_cast<size_t>(i)] != 0;
}

}  // namespace

std::vector<LevelEntry> greedy_pass(const ProblemInstance& inst, const PrecomputeCache& cache,
                                    const SearchConfig& cfg,
                                    const std::vector<std::vector<uint8_t>>& forbidden) {
  const int n = cache.n();
  const int depth = std::min(cfg.max_support, std::min(cache.m(), n));
  if (depth < 1) throw DomainError("greedy_pass: max_support must be at least 1");

  std::vector<LevelEntry> chain;
  chain.reserve(static_cast<size_t>(depth));

  // Level 1: best singleton straight from the cache.
  int best = -1;
  double best_nu = -std::numeric_limits<double>::infinity();
  const double prior1 = log_support_prior(1, inst.p, n);
  for (int i = 0; i < n; ++i) {
    if (blocked(forbidden, 0, i)) continue;
    const double nu =
        (std::norm(cache.phi_h_y()(i)) / cache.col_energy()(i) - cache.y_energy()) /
            inst.sigma2 +
        prior1;
    if (nu > best_nu) {
      best_nu = nu;
      best = i;
    }
  }
  if (best < 0) return chain;  // every index excluded at the root

  RecursiveState state(cache, best, depth);
  chain.push_back(LevelEntry{state.support(), best_nu, best});

  for (int level = 1; level < depth; ++level) {
    best = -1;
    best_nu = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (state.in_support(i) || blocked(forbidden, level, i)) continue;
      if (!state.viable(cache, i, cfg.eps_schur_rel)) continue;
      const double nu = state.candidate_metric(cache, i, inst.sigma2, inst.p, cfg.eps_schur_rel);
      if (nu > best_nu) {
        best_nu = nu;
        best = i;
      }
    }
    if (best < 0) break;  // exhausted: nothing admissible at this level
    state.commit(cache, best, cfg.eps_schur_rel);
    chain.push_back(LevelEntry{state.support(), best_nu, best});
  }
  return chain;
}

DominantSet repeated_search(const ProblemInstance& inst, const PrecomputeCache& cache,
                            const SearchConfig& cfg) {
  if (cfg.passes < 1) throw DomainError("repeated_search: passes must be at least 1");
  const int n = cache.n();
  const int depth = std::min(cfg.max_support, std::min(cache.m(), n));
  if (depth < 1) throw DomainError("repeated_search: max_support must be at least 1");

  std::vector<std::vector<uint8_t>> forbidden(
      static_cast<size_t>(depth), std::vector<uint8_t>(static_cast<size_t>(n), 0));
  DominantSet dominant;
  for (int pass = 0; pass < cfg.passes; ++pass) {
    const std::vector<LevelEntry> chain = greedy_pass(inst, cache, cfg, forbidden);
    for (size_t level = 0; level < chain.size(); ++level) {
      forbidden[level][static_cast<size_t>(chain[level].picked)] = 1;
      dominant.insert(chain[level].support, chain[level].nu);
    }
  }
  return dominant;
}

}  // namespace ngbmp
