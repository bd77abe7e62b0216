#include "classicml/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace classicml {
namespace linalg {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "matmul shape mismatch");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) {
    throw Error(ErrorCode::dimension_mismatch, "matvec shape mismatch");
  }
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), v);
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

void require_symmetric(const Matrix& a, double relative_tol) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::not_symmetric, "matrix is not square");
  }
  const double scale = std::max(max_abs(a), 1.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > relative_tol * scale) {
        throw Error(ErrorCode::not_symmetric, "matrix is not symmetric");
      }
    }
  }
}

namespace {

// Returns false when a pivot is not strictly positive.
bool try_cholesky(const Matrix& a, double jitter, Matrix& lower) {
  const std::size_t p = a.rows();
  lower = Matrix(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double diag = a(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double ljj = std::sqrt(diag);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return true;
}

}  // namespace

Cholesky::Cholesky(const Matrix& a) {
  require_symmetric(a);
  if (try_cholesky(a, 0.0, lower_)) return;
  double trace = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) trace += a(i, i);
  const double jitter = 1e-10 * trace / static_cast<double>(a.rows());
  if (!try_cholesky(a, jitter, lower_)) {
    throw Error(ErrorCode::singular_matrix,
                "matrix is not positive definite (even after jitter)");
  }
}

std::vector<double> Cholesky::solve_lower(std::span<const double> b) const {
  const std::size_t p = lower_.rows();
  std::vector<double> z(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * z[k];
    z[i] = s / lower_(i, i);
  }
  return z;
}

Matrix Cholesky::solve_lower(const Matrix& b) const {
  Matrix out(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    auto z = solve_lower(col);
    for (std::size_t i = 0; i < b.rows(); ++i) out(i, j) = z[i];
  }
  return out;
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  const std::size_t p = lower_.rows();
  if (b.size() != p) {
    throw Error(ErrorCode::dimension_mismatch, "solve shape mismatch");
  }
  std::vector<double> z = solve_lower(b);
  // Back substitution with L^T.
  std::vector<double> x(p);
  for (std::size_t ii = p; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < p; ++k) s -= lower_(k, ii) * x[k];
    x[ii] = s / lower_(ii, ii);
  }
  return x;
}

Matrix Cholesky::solve(const Matrix& b) const {
  if (b.rows() != lower_.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "solve shape mismatch");
  }
  Matrix out(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    auto x = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) out(i, j) = x[i];
  }
  return out;
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < lower_.rows(); ++i)
    s += std::log(lower_(i, i));
  return 2.0 * s;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  return Cholesky(a).solve(b);
}

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b) {
  return Cholesky(a).solve(b);
}

EigenResult sym_eig(const Matrix& a) {
  require_symmetric(a);
  const std::size_t p = a.rows();
  Matrix d = a;
  Matrix v = Matrix::identity(p);
  const double tol = 1e-12 * std::max(max_abs(a), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j)
        off = std::max(off, std::abs(d(i, j)));
    if (off <= tol) break;

    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double apq = d(i, j);
        if (std::abs(apq) <= tol) continue;
        const double app = d(i, i);
        const double aqq = d(j, j);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < p; ++k) {
          const double dik = d(i, k);
          const double djk = d(j, k);
          d(i, k) = c * dik - s * djk;
          d(j, k) = s * dik + c * djk;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double dki = d(k, i);
          const double dkj = d(k, j);
          d(k, i) = c * dki - s * dkj;
          d(k, j) = s * dki + c * dkj;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double vki = v(k, i);
          const double vkj = v(k, j);
          v(k, i) = c * vki - s * vkj;
          v(k, j) = s * vki + c * vkj;
        }
      }
    }
  }

  // Stable sort by descending eigenvalue keeps sweep order on ties.
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     return d(x, x) > d(y, y);
                   });

  EigenResult result;
  result.values.resize(p);
  result.vectors = Matrix(p, p);
  for (std::size_t col = 0; col < p; ++col) {
    const std::size_t src = order[col];
    result.values[col] = d(src, src);
    // Normalize and apply the sign convention.
    double norm = 0.0;
    for (std::size_t k = 0; k < p; ++k) norm += v(k, src) * v(k, src);
    norm = std::sqrt(norm);
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double mag = std::abs(v(k, src));
      if (mag > best) {
        best = mag;
        arg = k;
      }
    }
    const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < p; ++k)
      result.vectors(k, col) = sign * v(k, src) / norm;
  }
  return result;
}

std::pair<Matrix, std::vector<double>> center_columns(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<double> means(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) means[j] += x(i, j);
  for (std::size_t j = 0; j < p; ++j) means[j] /= static_cast<double>(n);
  Matrix centered(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) centered(i, j) = x(i, j) - means[j];
  return {std::move(centered), std::move(means)};
}

Matrix covariance(const Matrix& x, CovDivisor divisor) {
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorCode::empty_dataset, "covariance of no rows");
  if (divisor == CovDivisor::n_minus_1 && n < 2) {
    throw Error(ErrorCode::degenerate_input,
                "covariance with divisor n-1 needs at least two rows");
  }
  auto [centered, means] = center_columns(x);
  const std::size_t p = x.cols();
  const double div = divisor == CovDivisor::n
                         ? static_cast<double>(n)
                         : static_cast<double>(n - 1);
  Matrix cov(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += centered(i, a) * centered(i, b);
      cov(a, b) = s / div;
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

}  // namespace linalg
}  // namespace classicml
