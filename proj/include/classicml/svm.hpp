#pragma once

#include <vector>

#include "classicml/core.hpp"
#include "classicml/kernels.hpp"

namespace classicml {
namespace svm {

// Kernel machine in representer form: f(x) = sum_{i in SV} alpha_i K(x, x_i).
// alpha holds all n dual coefficients; the support set is exactly
// {i : |alpha_i| > 1e-9} and prediction touches only those rows.
struct SvmModel {
  bool regression = false;
  kernels::KernelSpec kernel;
  double c = 1.0;
  double epsilon = 0.0;
  std::vector<double> alpha;
  std::vector<int> support_indices;
  Matrix support_vectors;
  double objective = 0.0;
  int iterations = 0;
  Labels classes;  // classification only
};

inline constexpr double kSupportThreshold = 1e-9;

double hinge_loss(double y, double f);
double eps_insensitive_loss(double y, double f, double epsilon);

// Deterministic subgradient descent on
//   J(alpha) = sum_i max(0, 1 - y_i [K alpha]_i) + (1/2C) alpha^T K alpha
// with step_t = C/sqrt(t), keeping the best iterate by objective value. The
// returned objective never exceeds J(0) = n.
SvmModel fit_svc(const Matrix& x, const Labels& labels,
                 const kernels::KernelSpec& spec, double c,
                 int iterations = 5000);

// Same scheme on the epsilon-insensitive objective
//   sum_i max(0, |y_i - [K alpha]_i| - eps) + (1/2C) alpha^T K alpha.
SvmModel fit_svr(const Matrix& x, std::span<const double> y,
                 const kernels::KernelSpec& spec, double c, double epsilon,
                 int iterations = 5000);

std::vector<double> svm_decision(const SvmModel& model, const Matrix& x);
std::vector<int> svm_predict(const SvmModel& model, const Matrix& x);

// Objective value at a full dual vector; shared by the solver and tests.
double svc_objective(const Matrix& gram, std::span<const double> ysigned,
                     std::span<const double> alpha, double c);
double svr_objective(const Matrix& gram, std::span<const double> y,
                     std::span<const double> alpha, double c, double epsilon);

}  // namespace svm
}  // namespace classicml
