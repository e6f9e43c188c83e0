#ifndef NGBMP_SEARCH_HPP
#define NGBMP_SEARCH_HPP

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "ngbmp/recursive.hpp"
#include "ngbmp/types.hpp"

namespace ngbmp {

struct SearchConfig {
  int max_support = 1;              // chain depth P
  int passes = 5;                   // number of repeated passes D
  double tail_prob = 1e-3;          // tail mass used when P is derived from p
  double eps_schur_rel = kEpsSchur; // relative skip threshold for candidates
};

// Smallest chain depth P with Pr(|support| > P) <= tail_prob for a Bernoulli(p)
// activity pattern over n indices. Uses the Gaussian tail approximation
//   P = ceil(n p + sqrt(2 n p (1-p)) * erfcinv(2 tail_prob))
// when n*p > 5 and exact binomial tail summation otherwise. Result is clamped
// to [1, n]; callers bound it further by the measurement count where needed.
int compute_support_budget(int n, double p, double tail_prob);

// Inverse complementary error function on (0, 2); erfc_inv(1) = 0.
double erfc_inv(double z);

// One support per chain level, with the metric value and the index that was
// added at this level.
struct LevelEntry {
  SupportSet support;
  double nu = 0.0;
  int picked = -1;
};

struct DominantEntry {
  SupportSet support;
  double nu = 0.0;
};

// Candidate supports collected across passes, deduplicated by index set.
// Insertion order is preserved so downstream consumers are deterministic.
class DominantSet {
 public:
  // Returns false (and keeps the existing entry) when the set was seen before.
  bool insert(SupportSet s, double nu) {
    if (!seen_.insert(s).second) return false;
    entries_.push_back(DominantEntry{std::move(s), nu});
    return true;
  }
  const std::vector<DominantEntry>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<DominantEntry> entries_;
  std::unordered_set<SupportSet, SupportSetHash> seen_;
};

// Single greedy chain: level 1 picks the best singleton, each further level
// extends the current support by the candidate with the largest extension
// metric. forbidden[j] marks indices that may not be picked at level j
// (0-based); candidates whose Schur complement is below the skip threshold
// are passed over. The chain truncates early when no admissible candidate
// remains. Ties go to the lowest index.
std::vector<LevelEntry> greedy_pass(const ProblemInstance& inst, const PrecomputeCache& cache,
                                    const SearchConfig& cfg,
                                    const std::vector<std::vector<uint8_t>>& forbidden);

// Runs cfg.passes greedy chains, forbidding at each level the indices that
// earlier passes introduced at that same level, and merges all visited
// supports into one deduplicated dominant set.
DominantSet repeated_search(const ProblemInstance& inst, const PrecomputeCache& cache,
                            const SearchConfig& cfg);

}  // namespace ngbmp

#endif  // NGBMP_SEARCH_HPP
