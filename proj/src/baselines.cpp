#include "ngbmp/baselines.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "ngbmp/model.hpp"

namespace ngbmp {

namespace {

constexpr int kEnumLimit = 16;

// Calls fn on every subset of {0..n-1} with size <= k_max, empty set first,
// in increasing size then lexicographic order.
void for_each_support(int n, int k_max, const std::function<void(const SupportSet&)>& fn) {
  fn(SupportSet{});
  std::vector<int> combo;
  for (int k = 1; k <= k_max; ++k) {
    combo.assign(static_cast<size_t>(k), 0);
    for (int i = 0; i < k; ++i) combo[static_cast<size_t>(i)] = i;
    for (;;) {
      fn(SupportSet(combo));
      int pos = k - 1;
      while (pos >= 0 && combo[static_cast<size_t>(pos)] == n - k + pos) --pos;
      if (pos < 0) break;
      ++combo[static_cast<size_t>(pos)];
      for (int i = pos + 1; i < k; ++i)
        combo[static_cast<size_t>(i)] = combo[static_cast<size_t>(i - 1)] + 1;
    }
  }
}

int check_enum_size(const ProblemInstance& inst, int k_max) {
  if (inst.n() > kEnumLimit)
    throw TooLargeError("exhaustive enumeration limited to n <= " + std::to_string(kEnumLimit));
  if (k_max < 0) throw DomainError("exhaustive enumeration: negative k_max");
  return std::min(k_max, inst.n());
}

}  // namespace

DominantSet exhaustive_supports(const ProblemInstance& inst, int k_max) {
  const int cap = check_enum_size(inst, k_max);
  DominantSet all;
  for_each_support(inst.n(), cap, [&](const SupportSet& s) {
    try {
      all.insert(s, metric_direct(inst, s));
    } catch (const RankDeficientError&) {
      // unscorable support: leave it out
    }
  });
  return all;
}

VectorXcd exhaustive_mmse(const ProblemInstance& inst, int k_max, int* dropped_out) {
  const int cap = check_enum_size(inst, k_max);
  // Collect (support, nu) first, then mix; the empty support contributes a
  // zero estimate with nonzero weight.
  DominantSet all = exhaustive_supports(inst, cap);
  if (all.empty()) throw RankDeficientError("exhaustive_mmse: nothing scorable");

  VectorXd w(all.size());
  {
    double nu_max = -std::numeric_limits<double>::infinity();
    for (const auto& e : all.entries()) nu_max = std::max(nu_max, e.nu);
    for (int k = 0; k < all.size(); ++k)
      w(k) = std::exp(all.entries()[static_cast<size_t>(k)].nu - nu_max);
    w /= w.sum();
  }

  VectorXcd x = VectorXcd::Zero(inst.n());
  double kept = 0.0;
  int dropped = 0;
  for (int k = 0; k < all.size(); ++k) {
    const SupportSet& s = all.entries()[static_cast<size_t>(k)].support;
    if (s.empty()) {
      kept += w(k);  // zero vector estimate
      continue;
    }
    try {
      x += w(k) * embed(blue_estimate(inst.phi, inst.y, s), s, inst.n());
      kept += w(k);
    } catch (const RankDeficientError&) {
      ++dropped;
    }
  }
  if (dropped_out) *dropped_out = dropped;
  if (kept <= 0.0) throw RankDeficientError("exhaustive_mmse: every support degenerate");
  return x / kept;
}

SupportSet exhaustive_map(const ProblemInstance& inst, int k_max) {
  const int cap = check_enum_size(inst, k_max);
  bool have = false;
  SupportSet best;
  double best_nu = -std::numeric_limits<double>::infinity();
  for_each_support(inst.n(), cap, [&](const SupportSet& s) {
    double nu;
    try {
      nu = metric_direct(inst, s);
    } catch (const RankDeficientError&) {
      return;
    }
    const bool wins =
        !have || nu > best_nu ||
        (nu == best_nu && (s.size() < best.size() || (s.size() == best.size() && s < best)));
    if (wins) {
      have = true;
      best = s;
      best_nu = nu;
    }
  });
  if (!have) throw RankDeficientError("exhaustive_map: nothing scorable");
  return best;
}

SparseSignal omp_recover(const MatrixXcd& phi, const VectorXcd& y, const OmpStop& stop) {
  const int m = static_cast<int>(phi.rows());
  const int n = static_cast<int>(phi.cols());
  if (y.size() != m) throw DomainError("omp_recover: y length does not match matrix rows");
  if (!stop.k_target && !stop.residual_tol)
    throw DomainError("omp_recover: no stopping rule supplied");
  if (stop.k_target && (*stop.k_target < 0 || *stop.k_target > std::min(m, n)))
    throw DomainError("omp_recover: k_target outside [0, min(m,n)]");

  const VectorXd col_norm = phi.colwise().norm().real().transpose();
  for (int i = 0; i < n; ++i)
    if (col_norm(i) < 1e-12) throw ZeroColumnError("omp_recover: zero-energy column");

  const double y_norm = y.norm();
  VectorXcd r = y;
  std::vector<int> picked;
  VectorXcd coef;
  SupportSet s;

  const int k_cap = stop.k_target ? *stop.k_target : std::min(m, n);
  while (static_cast<int>(picked.size()) < k_cap) {
    if (stop.residual_tol && r.norm() <= *stop.residual_tol * y_norm) break;

    int best = -1;
    double best_corr = 0.0;
    for (int i = 0; i < n; ++i) {
      if (s.contains(i)) continue;
      const double corr = std::abs((phi.col(i).dot(r))) / col_norm(i);
      if (corr > best_corr) {
        best_corr = corr;
        best = i;
      }
    }
    // Nothing correlates with the residual any more (e.g. y = 0): stop.
    if (best < 0 || best_corr <= 1e-14 * std::max(1.0, y_norm)) break;

    SupportSet extended = s.with(best);
    VectorXcd refit;
    try {
      refit = blue_estimate(phi, y, extended);
    } catch (const RankDeficientError&) {
      break;  // the new column is numerically dependent: keep the old fit
    }
    s = std::move(extended);
    coef = std::move(refit);
    picked.push_back(best);
    r = y - submatrix(phi, s) * coef;
  }

  if (s.empty()) return SparseSignal{VectorXcd::Zero(n), SupportSet{}};
  return SparseSignal::from_values(embed(coef, s, n));
}

}  // namespace ngbmp
