#include "ngbmp/model.hpp"

#include <cmath>
#include <limits>

namespace ngbmp {

namespace {

// Solves A c = b for Hermitian positive semi-definite A via Cholesky with
// diagonal pivoting. Pivots are compared against eps_rank times the largest
// initial diagonal; running out of acceptable pivots means the support is
// numerically rank-deficient.
VectorXcd pivoted_hermitian_solve(MatrixXcd a, VectorXcd b) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;

  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i).real());
  const double floor = kEpsRank * max_diag;

  // In-place pivoted Cholesky: A = L L^H with rows/cols symmetrically permuted.
  // The trailing block is updated in full (both triangles) so that it stays
  // Hermitian in storage; that is what makes the plain row/column swaps below
  // a valid symmetric permutation.
  for (int j = 0; j < n; ++j) {
    int piv = j;
    double best = a(j, j).real();
    for (int i = j + 1; i < n; ++i)
      if (a(i, i).real() > best) {
        best = a(i, i).real();
        piv = i;
      }
    if (!(best > floor) || !std::isfinite(best))
      throw RankDeficientError("blue_estimate: Gram pivot below rank tolerance");
    if (piv != j) {
      a.row(j).swap(a.row(piv));
      a.col(j).swap(a.col(piv));
      std::swap(b(j), b(piv));
      std::swap(perm[static_cast<size_t>(j)], perm[static_cast<size_t>(piv)]);
    }
    const double d = std::sqrt(a(j, j).real());
    a(j, j) = d;
    for (int i = j + 1; i < n; ++i) a(i, j) /= d;
    for (int k = j + 1; k < n; ++k)
      for (int i = j + 1; i < n; ++i) a(i, k) -= a(i, j) * std::conj(a(k, j));
  }

  // Forward then backward substitution with the triangle just computed.
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) b(i) -= a(i, k) * b(k);
    b(i) /= a(i, i).real();
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) b(i) -= std::conj(a(k, i)) * b(k);
    b(i) /= a(i, i).real();
  }

  VectorXcd c(n);
  for (int i = 0; i < n; ++i) c(perm[static_cast<size_t>(i)]) = b(i);
  return c;
}

}  // namespace

VectorXcd blue_estimate(const MatrixXcd& phi, const VectorXcd& y, const SupportSet& s) {
  if (s.empty()) return VectorXcd(0);
  if (s[s.size() - 1] >= phi.cols())
    throw DomainError("blue_estimate: support index out of range");
  const MatrixXcd sub = submatrix(phi, s);
  const MatrixXcd gram = sub.adjoint() * sub;
  const VectorXcd rhs = sub.adjoint() * y;
  return pivoted_hermitian_solve(gram, rhs);
}

double residual_energy(const MatrixXcd& phi, const VectorXcd& y, const SupportSet& s) {
  const double total = y.squaredNorm();
  if (s.empty()) return total;
  const VectorXcd c = blue_estimate(phi, y, s);
  const double projected = (submatrix(phi, s) * c).squaredNorm();
  // The difference is a norm; round-off may push it a hair negative.
  return std::max(0.0, total - projected);
}

double log_support_prior(int card, double p, int n) {
  if (!(p > 0.0) || !(p < 1.0)) throw DomainError("log_support_prior: p outside (0,1)");
  if (card < 0 || card > n) throw DomainError("log_support_prior: cardinality outside [0,n]");
  return card * std::log(p) + (n - card) * std::log1p(-p);
}

double metric_direct(const ProblemInstance& inst, const SupportSet& s) {
  return -residual_energy(inst.phi, inst.y, s) / inst.sigma2 +
         log_support_prior(s.size(), inst.p, inst.n());
}

double nmse_db(const std::vector<std::pair<VectorXcd, VectorXcd>>& truth_and_estimate) {
  if (truth_and_estimate.empty()) throw DomainError("nmse_db: no trials");
  double sum = 0.0;
  for (const auto& [x, xhat] : truth_and_estimate) {
    const double ref = x.squaredNorm();
    if (ref == 0.0) throw DomainError("nmse_db: zero-norm reference signal");
    sum += (xhat - x).squaredNorm() / ref;
  }
  const double mean = sum / static_cast<double>(truth_and_estimate.size());
  if (mean == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mean);
}

}  // namespace ngbmp
