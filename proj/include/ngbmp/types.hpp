#ifndef NGBMP_TYPES_HPP
#define NGBMP_TYPES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ngbmp/errors.hpp"

namespace ngbmp {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Set of column indices, kept strictly increasing so that two supports are
// equal iff they denote the same set.
class SupportSet {
 public:
  SupportSet() = default;

  // Accepts indices in any order; sorts and rejects duplicates / negatives.
  explicit SupportSet(std::vector<int> indices) : idx_(std::move(indices)) {
    std::sort(idx_.begin(), idx_.end());
    if (!idx_.empty() && idx_.front() < 0)
      throw DomainError("SupportSet: negative index");
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
      throw DomainError("SupportSet: duplicate index");
  }

  int size() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  int operator[](int k) const { return idx_[static_cast<size_t>(k)]; }
  const std::vector<int>& indices() const { return idx_; }

  bool contains(int i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
  }

  // Copy of this set with one more index inserted.
  SupportSet with(int i) const {
    std::vector<int> v = idx_;
    v.insert(std::upper_bound(v.begin(), v.end(), i), i);
    SupportSet s;
    s.idx_ = std::move(v);
    if (contains(i)) throw DomainError("SupportSet::with: index already present");
    return s;
  }

  bool operator==(const SupportSet& o) const { return idx_ == o.idx_; }
  bool operator!=(const SupportSet& o) const { return idx_ != o.idx_; }
  // Lexicographic order on the sorted index lists; used for deterministic ties.
  bool operator<(const SupportSet& o) const { return idx_ < o.idx_; }

  std::string str() const {
    std::string s = "{";
    for (size_t k = 0; k < idx_.size(); ++k)
      s += (k ? "," : "") + std::to_string(idx_[k]);
    return s + "}";
  }

 private:
  std::vector<int> idx_;
};

struct SupportSetHash {
  size_t operator()(const SupportSet& s) const {
    size_t h = 0x9e3779b97f4a7c15ull;
    for (int i : s.indices())
      h ^= static_cast<size_t>(i) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

// Length-N vector paired with its support; values(j) != 0 exactly when j is
// in the support.
struct SparseSignal {
  VectorXcd values;
  SupportSet support;

  static SparseSignal from_values(VectorXcd v) {
    std::vector<int> nz;
    for (int j = 0; j < v.size(); ++j)
      if (v(j) != Complex(0.0, 0.0)) nz.push_back(j);
    return SparseSignal{std::move(v), SupportSet(std::move(nz))};
  }
};

// One measurement model instance: y = phi * x + n, noise variance sigma2
// (total variance of each complex noise entry), activity rate p.
struct ProblemInstance {
  MatrixXcd phi;
  VectorXcd y;
  double sigma2 = 1.0;
  double p = 0.01;

  ProblemInstance() = default;
  ProblemInstance(MatrixXcd phi_in, VectorXcd y_in, double sigma2_in, double p_in)
      : phi(std::move(phi_in)), y(std::move(y_in)), sigma2(sigma2_in), p(p_in) {
    validate();
  }

  int m() const { return static_cast<int>(phi.rows()); }
  int n() const { return static_cast<int>(phi.cols()); }

  void validate() const {
    if (phi.rows() == 0 || phi.cols() == 0)
      throw DomainError("ProblemInstance: empty measurement matrix");
    if (y.size() != phi.rows())
      throw DomainError("ProblemInstance: y length does not match matrix rows");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
      throw DomainError("ProblemInstance: sigma2 must be positive and finite");
    if (!(p > 0.0) || !(p < 1.0))
      throw DomainError("ProblemInstance: p must lie in (0,1)");
    if (!phi.allFinite() || !y.allFinite())
      throw DomainError("ProblemInstance: non-finite entries");
  }
};

// Columns of phi restricted to a support, in the support's (sorted) order.
inline MatrixXcd submatrix(const MatrixXcd& phi, const SupportSet& s) {
  MatrixXcd sub(phi.rows(), s.size());
  for (int k = 0; k < s.size(); ++k) sub.col(k) = phi.col(s[k]);
  return sub;
}

// Places support-ordered coefficients back into a length-n vector.
inline VectorXcd embed(const VectorXcd& coef, const SupportSet& s, int n) {
  if (coef.size() != s.size())
    throw DomainError("embed: coefficient count does not match support size");
  VectorXcd x = VectorXcd::Zero(n);
  for (int k = 0; k < s.size(); ++k) x(s[k]) = coef(k);
  return x;
}

}  // namespace ngbmp

#endif  // NGBMP_TYPES_HPP
