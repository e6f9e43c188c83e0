#ifndef NGBMP_BASELINES_HPP
#define NGBMP_BASELINES_HPP

#include <optional>

#include "ngbmp/search.hpp"
#include "ngbmp/types.hpp"

namespace ngbmp {

// Exact posterior mixture over every support of size <= k_max (the empty set
// included), for problems small enough to enumerate (n <= 16). Degenerate
// supports are dropped from the mixture with their weight renormalized away;
// the drop count lands in *dropped_out when given. Intended as a ground-truth
// oracle for the greedy pipeline, so it shares nothing with the recursive
// engine: every support is scored by the direct metric.
VectorXcd exhaustive_mmse(const ProblemInstance& inst, int k_max, int* dropped_out = nullptr);

// Exact metric argmax over the same enumeration (ties: smaller support, then
// lexicographic). May return the empty set.
SupportSet exhaustive_map(const ProblemInstance& inst, int k_max);

// Every enumerated support with its metric, for callers that want the whole
// posterior (supports whose metric cannot be evaluated are skipped).
DominantSet exhaustive_supports(const ProblemInstance& inst, int k_max);

struct OmpStop {
  std::optional<int> k_target;        // stop after this many selections
  std::optional<double> residual_tol; // stop once ||r|| <= tol * ||y||
};

// Orthogonal matching pursuit: repeatedly pick the column most correlated
// with the residual (normalized by column norm, ties to the lowest index),
// refit least squares on the selected set, and subtract. Stops at k_target
// selections, at the residual tolerance, or when the residual correlation
// vanishes; at least one stopping rule must be supplied.
SparseSignal omp_recover(const MatrixXcd& phi, const VectorXcd& y, const OmpStop& stop);

}  // namespace ngbmp

#endif  // NGBMP_BASELINES_HPP
