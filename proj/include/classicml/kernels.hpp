#pragma once

#include <string>
#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace kernels {

enum class KernelKind { linear, polynomial, sigmoid, rbf };

// Kernel family and parameters. linear ignores every parameter; rbf ignores
// c0 and degree.
struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;
  double c0 = 0.0;
  int degree = 3;
};

void validate(const KernelSpec& spec);

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

// Gram matrix of kernel evaluations between the rows of a and b. Row blocks
// are independent, so the OpenMP path matches the serial path bit for bit.
Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);
Matrix gram_serial(const KernelSpec& spec, const Matrix& a, const Matrix& b);
Matrix gram_omp(const KernelSpec& spec, const Matrix& a, const Matrix& b,
                int threads);

// Kernel ridge regression: alpha solves (K + lambda I) alpha = y and
// prediction is f(x) = sum_i alpha_i K(x, x_i).
struct KernelRidgeModel {
  Matrix train_x;
  std::vector<double> alpha;
  double lambda = 0.0;
  KernelSpec kernel;
};

KernelRidgeModel fit_kernel_ridge(const Matrix& x, std::span<const double> y,
                                  const KernelSpec& spec, double lambda);
std::vector<double> krr_predict(const KernelRidgeModel& model,
                                const Matrix& x);

// Kernel PCA on the double-centered Gram matrix. Eigenvectors are rescaled
// by 1/sqrt(eigenvalue) so the corresponding feature-space directions are
// unit vectors. When fewer than l eigenvalues exceed 1e-10 the component
// count is reduced and `reduced` records the fact.
struct KernelPcaModel {
  Matrix train_x;
  KernelSpec kernel;
  Matrix alphas;                      // n x l, already normalized
  std::vector<double> eigenvalues;    // l, descending
  std::vector<double> train_col_means;  // column means of the raw Gram
  double train_mean = 0.0;              // overall mean of the raw Gram
  int requested_components = 0;
  bool reduced = false;

  int components() const { return static_cast<int>(eigenvalues.size()); }
};

KernelPcaModel kernel_pca_fit(const Matrix& x, const KernelSpec& spec, int l);

// Out-of-sample projection consistent with the centered training Gram: the
// cross-kernel row k_z is centered as
//   k~_z(j) = k_z(j) - mean(k_z) - colmean_j(K) + mean(K)
// before taking dot products with the normalized eigenvectors.
Matrix kernel_pca_transform(const KernelPcaModel& model, const Matrix& z);

std::string kind_name(KernelKind kind);
KernelKind kind_from_name(const std::string& name);

}  // namespace kernels
}  // namespace classicml
