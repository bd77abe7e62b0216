#pragma once

#include <utility>
#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace linalg {

// Eigen pairs of a symmetric matrix, eigenvalues sorted descending.
// Column i of vectors goes with values[i], has unit norm, and is oriented so
// that its entry of largest magnitude is positive (ties: lowest index).
struct EigenResult {
  std::vector<double> values;
  Matrix vectors;
};

// Cholesky factorization of a symmetric positive definite matrix. A failed
// factorization is retried once with 1e-10*trace(A)/p added to the diagonal;
// a second failure throws a singular-matrix error.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);

  std::vector<double> solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;

  // Solves L z = b (forward substitution only).
  std::vector<double> solve_lower(std::span<const double> b) const;
  Matrix solve_lower(const Matrix& b) const;

  double log_det() const;
  const Matrix& factor() const { return lower_; }

 private:
  Matrix lower_;
};

Matrix solve_spd(const Matrix& a, const Matrix& b);
std::vector<double> solve_spd(const Matrix& a, std::span<const double> b);

// Cyclic Jacobi rotations; stops when the largest off-diagonal magnitude
// drops below 1e-12 * max|A| or after 100 sweeps.
EigenResult sym_eig(const Matrix& a);

std::pair<Matrix, std::vector<double>> center_columns(const Matrix& x);

enum class CovDivisor { n, n_minus_1 };

Matrix covariance(const Matrix& x, CovDivisor divisor);

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

double max_abs(const Matrix& a);

void require_symmetric(const Matrix& a, double relative_tol = 1e-10);

}  // namespace linalg
}  // namespace classicml
