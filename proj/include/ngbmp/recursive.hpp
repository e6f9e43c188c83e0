#ifndef NGBMP_RECURSIVE_HPP
#define NGBMP_RECURSIVE_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "ngbmp/types.hpp"

namespace ngbmp {

// Relative Schur-complement floor: a candidate i is treated as numerically
// dependent on the committed columns once f_i < kEpsSchur * col_energy(i).
inline constexpr double kEpsSchur = 1e-10;

// Per-instance quantities shared by every search over the same (phi, y):
// column/observation inner products, column energies, singleton coefficients,
// and a lazily filled memo of Gram columns. Immutable after construction
// apart from the memo, which is guarded so concurrent searches may share it.
class PrecomputeCache {
 public:
  PrecomputeCache(MatrixXcd phi, VectorXcd y);

  PrecomputeCache(const PrecomputeCache&) = delete;
  PrecomputeCache& operator=(const PrecomputeCache&) = delete;

  int m() const { return static_cast<int>(phi_.rows()); }
  int n() const { return static_cast<int>(phi_.cols()); }
  const MatrixXcd& phi() const { return phi_; }
  const VectorXcd& y() const { return y_; }

  // phi_i^H y for every column.
  const VectorXcd& phi_h_y() const { return phi_h_y_; }
  // ||phi_i||^2 for every column.
  const VectorXd& col_energy() const { return col_energy_; }
  // Singleton least-squares coefficient phi_i^H y / ||phi_i||^2.
  const VectorXcd& singleton_coef() const { return singleton_coef_; }
  double y_energy() const { return y_energy_; }

  // Column i of phi^H phi (entry j is phi_j^H phi_i), computed on first use
  // and memoized. Thread-safe; the returned view stays valid for the cache's
  // lifetime.
  Eigen::Ref<const VectorXcd> gram_col(int i) const;

 private:
  MatrixXcd phi_;
  VectorXcd y_;
  VectorXcd phi_h_y_;
  VectorXd col_energy_;
  VectorXcd singleton_coef_;
  double y_energy_ = 0.0;

  // Lazy Gram memo. Small problems get one contiguous table; larger ones get
  // per-column slots so memory grows only with the columns actually touched.
  static constexpr int kDenseGramLimit = 4096;
  mutable std::mutex gram_mu_;
  mutable MatrixXcd gram_dense_;
  mutable std::vector<std::unique_ptr<VectorXcd>> gram_cols_;
  mutable std::vector<uint8_t> gram_ready_;
};

// Convenience spelling matching the rest of the pipeline's free functions.
PrecomputeCache precompute(MatrixXcd phi, VectorXcd y);

// Expanding support with everything needed to score and absorb one more
// column in O(n * |support|) work: committed coefficients, captured signal
// energy, and per-candidate cross terms against the committed columns.
//
// Writing S for the committed set, the state maintains for every column i:
//   q_i     = phi_S^H phi_i
//   e_i     = (phi_S^H phi_S)^{-1} q_i
//   f_i     = ||phi_i||^2 - q_i^H e_i      (Schur complement, real, >= 0)
// together with coef = (phi_S^H phi_S)^{-1} phi_S^H y in commit order and
// xi = ||phi_S coef||^2. Extending S by i updates all of these with one Gram
// column and rank-one arithmetic; no factorization is ever recomputed.
class RecursiveState {
 public:
  // Starts a chain at the singleton {first}. `capacity` reserves rows for the
  // expected chain depth; the state grows automatically past it.
  RecursiveState(const PrecomputeCache& cache, int first, int capacity = 32);

  int size() const { return static_cast<int>(order_.size()); }
  // Committed indices in commit order.
  const std::vector<int>& committed() const { return order_; }
  // Committed indices as a canonical set.
  SupportSet support() const { return SupportSet(order_); }
  // Least-squares coefficients aligned with committed().
  Eigen::Ref<const VectorXcd> coefficients() const {
    return coef_.head(size());
  }
  // Captured energy ||phi_S coef||^2.
  double xi() const { return xi_; }

  bool in_support(int i) const { return in_support_[static_cast<size_t>(i)] != 0; }
  // Schur complement of candidate i against the committed columns.
  double schur(int i) const { return f_(i); }
  // True when i is outside the support and numerically independent of it.
  bool viable(const PrecomputeCache& cache, int i, double eps_rel = kEpsSchur) const {
    return !in_support(i) && f_(i) >= eps_rel * cache.col_energy()(i);
  }

  // Selection metric of support() extended by candidate i:
  //   (xi + |r_i|^2 / f_i - ||y||^2) / sigma2 + log_support_prior(|S|+1)
  // with r_i = phi_i^H y - q_i^H coef. Costs O(|S|). Throws NearSingularError
  // for a non-viable candidate, DomainError if i is already committed.
  double candidate_metric(const PrecomputeCache& cache, int i, double sigma2,
                          double p, double eps_rel = kEpsSchur) const;

  // Extends the support by i (append order), updating coefficients, xi and
  // every candidate's cross terms. Costs O(n * |S|) plus one Gram column.
  void commit(const PrecomputeCache& cache, int i, double eps_rel = kEpsSchur);

 private:
  void ensure_capacity(int rows, int n);
  // Residual correlation r_i of candidate i against the current fit.
  Complex residual_corr(const PrecomputeCache& cache, int i) const;

  std::vector<int> order_;
  std::vector<uint8_t> in_support_;
  VectorXcd coef_;   // commit-order coefficients, first size() entries valid
  double xi_ = 0.0;
  MatrixXcd q_;      // rows 0..size()-1: q vectors per candidate column
  MatrixXcd ephi_;   // rows 0..size()-1: e vectors per candidate column
  VectorXd f_;       // Schur complements per candidate column
};

// Free-function spelling matching the rest of the pipeline.
RecursiveState init_state(const PrecomputeCache& cache, int first, int capacity = 32);

}  // namespace ngbmp

#endif  // NGBMP_RECURSIVE_HPP
