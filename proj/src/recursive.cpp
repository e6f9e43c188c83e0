#include "ngbmp/recursive.hpp"

#include <cassert>
#include <cmath>

#include "ngbmp/model.hpp"

namespace ngbmp {

PrecomputeCache::PrecomputeCache(MatrixXcd phi, VectorXcd y)
    : phi_(std::move(phi)), y_(std::move(y)) {
  if (y_.size() != phi_.rows())
    throw DomainError("precompute: y length does not match matrix rows");
  const int n = static_cast<int>(phi_.cols());
  phi_h_y_ = phi_.adjoint() * y_;
  col_energy_ = phi_.colwise().squaredNorm().real().transpose();
  for (int i = 0; i < n; ++i)
    if (col_energy_(i) < 1e-24)
      throw ZeroColumnError("precompute: column " + std::to_string(i) + " has zero energy");
  singleton_coef_ = phi_h_y_.cwiseQuotient(col_energy_.cast<Complex>());
  y_energy_ = y_.squaredNorm();

  gram_ready_.assign(static_cast<size_t>(n), 0);
  if (n <= kDenseGramLimit) {
    gram_dense_.resize(n, n);  // storage only; columns are filled on demand
  } else {
    gram_cols_.resize(static_cast<size_t>(n));
  }
}

Eigen::Ref<const VectorXcd> PrecomputeCache::gram_col(int i) const {
  std::lock_guard<std::mutex> lock(gram_mu_);
  if (!gram_ready_[static_cast<size_t>(i)]) {
    if (gram_dense_.size() > 0) {
      gram_dense_.col(i).noalias() = phi_.adjoint() * phi_.col(i);
    } else {
      gram_cols_[static_cast<size_t>(i)] =
          std::make_unique<VectorXcd>(phi_.adjoint() * phi_.col(i));
    }
    gram_ready_[static_cast<size_t>(i)] = 1;
  }
  if (gram_dense_.size() > 0) return gram_dense_.col(i);
  return *gram_cols_[static_cast<size_t>(i)];
}

PrecomputeCache precompute(MatrixXcd phi, VectorXcd y) {
  return PrecomputeCache(std::move(phi), std::move(y));
}

RecursiveState::RecursiveState(const PrecomputeCache& cache, int first, int capacity) {
  const int n = cache.n();
  if (first < 0 || first >= n) throw DomainError("init_state: index out of range");
  ensure_capacity(std::max(capacity, 1), n);

  order_.push_back(first);
  in_support_.assign(static_cast<size_t>(n), 0);
  in_support_[static_cast<size_t>(first)] = 1;

  coef_(0) = cache.singleton_coef()(first);
  xi_ = std::norm(cache.phi_h_y()(first)) / cache.col_energy()(first);

  // Cross terms of every column against the singleton support:
  // q_i = phi_first^H phi_i, e_i = q_i / ||phi_first||^2.
  q_.row(0) = cache.gram_col(first).adjoint();
  ephi_.row(0) = q_.row(0) / cache.col_energy()(first);
  f_ = cache.col_energy() -
       (q_.row(0).conjugate().cwiseProduct(ephi_.row(0))).real().transpose();
  f_ = f_.cwiseMax(0.0);
}

void RecursiveState::ensure_capacity(int rows, int n) {
  if (q_.rows() >= rows) return;
  int cap = q_.rows() > 0 ? static_cast<int>(q_.rows()) : rows;
  while (cap < rows) cap *= 2;
  q_.conservativeResize(cap, n);
  ephi_.conservativeResize(cap, n);
  coef_.conservativeResize(cap);
}

Complex RecursiveState::residual_corr(const PrecomputeCache& cache, int i) const {
  const int k = size();
  return cache.phi_h_y()(i) - q_.col(i).head(k).dot(coef_.head(k));
}

double RecursiveState::candidate_metric(const PrecomputeCache& cache, int i,
                                        double sigma2, double p, double eps_rel) const {
  if (in_support(i)) throw DomainError("candidate_metric: candidate already committed");
  if (!(f_(i) >= eps_rel * cache.col_energy()(i)))
    throw NearSingularError("candidate_metric: Schur complement below skip threshold");
  const Complex r = residual_corr(cache, i);
  const double xi_next = xi_ + std::norm(r) / f_(i);
  return (xi_next - cache.y_energy()) / sigma2 +
         log_support_prior(size() + 1, p, cache.n());
}

void RecursiveState::commit(const PrecomputeCache& cache, int i, double eps_rel) {
  if (in_support(i)) throw DomainError("commit: candidate already committed");
  if (!(f_(i) >= eps_rel * cache.col_energy()(i)))
    throw NearSingularError("commit: Schur complement below skip threshold");

  const int k = size();
  const int n = cache.n();
  ensure_capacity(k + 1, n);

  // Saved slices of the winning candidate before the tables change.
  const VectorXcd q_star = q_.col(i).head(k);
  const VectorXcd e_star = ephi_.col(i).head(k);
  const double f_star = f_(i);
  const Complex r_star = residual_corr(cache, i);

  // Coefficient update from the block inverse of the extended Gram: the new
  // column takes alpha = r/f, existing coefficients shed alpha * e_star.
  const Complex alpha = r_star / f_star;
  coef_.head(k) -= alpha * e_star;
  coef_(k) = alpha;
  xi_ += std::norm(r_star) / f_star;

  // One Gram column serves every candidate: t(j) = phi_i^H phi_j.
  const Eigen::RowVectorXcd t = cache.gram_col(i).adjoint();

  // beta_j = (t_j - q_star^H e_j) / f_star extends each candidate's e vector;
  // the top rows shed the rank-one piece e_star * beta.
  const Eigen::RowVectorXcd beta =
      (t - q_star.adjoint() * ephi_.topRows(k)) / f_star;
  ephi_.topRows(k).noalias() -= e_star * beta;
  ephi_.row(k) = beta;
  q_.row(k) = t;

  // Schur complements recomputed from their definition against the extended
  // tables; round-off may dip slightly negative, which gets clamped.
  VectorXd cross = (q_.topRows(k + 1).conjugate().cwiseProduct(ephi_.topRows(k + 1)))
                       .colwise()
                       .sum()
                       .real()
                       .transpose();
  f_ = cache.col_energy() - cross;
  for (int j = 0; j < n; ++j) {
    if (!in_support_[static_cast<size_t>(j)] && j != i)
      assert(f_(j) >= -1e-9 * cache.col_energy()(j) && "Schur update broke positivity");
  }
  f_ = f_.cwiseMax(0.0);

  order_.push_back(i);
  in_support_[static_cast<size_t>(i)] = 1;
}

RecursiveState init_state(const PrecomputeCache& cache, int first, int capacity) {
  return RecursiveState(cache, first, capacity);
}

}  // namespace ngbmp
