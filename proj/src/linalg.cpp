#include "emkm/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace emkm {

void CholeskyFactor::solve_into(std::span<const double> v, std::span<double> y) const {
  const std::size_t n = dim_;
  // forward: L w = v (w written into y)
  for (std::size_t i = 0; i < n; ++i) {
    double s = v[i];
    const double* row = l_.data() + i * n;
    for (std::size_t j = 0; j < i; ++j) s -= row[j] * y[j];
    y[i] = s / row[i];
  }
  // backward: L^T y = w
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= l_[j * n + i] * y[j];
    y[i] = s / l_[i * n + i];
  }
}

Vec CholeskyFactor::solve(std::span<const double> v) const {
  if (v.size() != dim_) throw std::invalid_argument("solve: dimension mismatch");
  Vec y(dim_);
  solve_into(v, y);
  return y;
}

std::optional<CholeskyFactor> cholesky(const SymMatrix& m) {
  const std::size_t n = m.dim();
  CholeskyFactor f;
  f.dim_ = n;
  f.l_.assign(n * n, 0.0);
  double sum_log_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= f.l_[i * n + k] * f.l_[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return std::nullopt;  // not positive-definite (or NaN)
        const double d = std::sqrt(s);
        f.l_[i * n + i] = d;
        sum_log_diag += std::log(d);
      } else {
        f.l_[i * n + j] = s / f.l_[j * n + j];
      }
    }
  }
  f.log_det_ = 2.0 * sum_log_diag;
  return f;
}

SymMatrix regularize(const SymMatrix& m) {
  const std::size_t n = m.dim();
  const double eps = std::max(1e-6 * m.trace() / static_cast<double>(n), 1e-12);
  SymMatrix out = m;
  for (std::size_t i = 0; i < n; ++i) out.add(i, i, eps);
  return out;
}

}  // namespace emkm
