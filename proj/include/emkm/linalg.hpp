#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace emkm {

using Vec = std::vector<double>;

// Dense symmetric matrix with full row-major storage. Writes go through
// set(), which mirrors across the diagonal, so entries stay exactly
// symmetric by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

  static SymMatrix identity(std::size_t dim, double scale = 1.0) {
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, i, scale);
    return m;
  }

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    a_[i * dim_ + j] = v;
    a_[j * dim_ + i] = v;
  }
  void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += a_[i * dim_ + i];
    return t;
  }

  bool operator==(const SymMatrix& other) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

// Lower-triangular Cholesky factor L of an SPD matrix M = L * L^T.
// Carries log|M| = 2 * sum(log diag L), computed once at factorization.
class CholeskyFactor {
 public:
  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return l_[i * dim_ + j]; }
  double log_det() const { return log_det_; }

  // y with (L L^T) y = v: forward then backward substitution. No allocation.
  void solve_into(std::span<const double> v, std::span<double> y) const;
  Vec solve(std::span<const double> v) const;

 private:
  friend std::optional<CholeskyFactor> cholesky(const SymMatrix& m);
  std::size_t dim_ = 0;
  std::vector<double> l_;
  double log_det_ = 0.0;
};

// Cholesky-Banachiewicz factorization. Returns nullopt when the input is not
// positive-definite (the caller decides whether to regularize and retry).
std::optional<CholeskyFactor> cholesky(const SymMatrix& m);

inline double log_det(const CholeskyFactor& factor) { return factor.log_det(); }

inline Vec solve(const CholeskyFactor& factor, std::span<const double> v) {
  return factor.solve(v);
}

// m + eps*I with eps = max(1e-6 * trace(m)/dim, 1e-12). The scaling by the
// mean diagonal keeps the perturbation proportionate for unnormalized data.
SymMatrix regularize(const SymMatrix& m);

}  // namespace emkm
