#pragma once

#include <string>
#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace linear {

enum class Penalty { none, l2, l1, elastic_net };

// Affine regression model: y(x) = intercept + coef . x.
struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coef;
  Penalty penalty = Penalty::none;
  double lambda = 0.0;
  double alpha = 1.0;  // elastic-net l1 fraction
  bool has_intercept = true;
};

LinearModel fit_ols(const Matrix& x, std::span<const double> y,
                    bool fit_intercept = true);
LinearModel fit_ridge(const Matrix& x, std::span<const double> y,
                      double lambda, bool fit_intercept = true);

// Cyclic coordinate descent with exact soft-threshold updates on
//   ||y - Xw||^2 + lambda*alpha*||w||_1 + lambda*(1-alpha)*||w||_2^2.
// The intercept is never penalized and is refreshed every cycle. Converges
// when the largest coefficient change in a cycle drops to 1e-8, fails after
// 1e4 cycles.
LinearModel fit_lasso(const Matrix& x, std::span<const double> y,
                      double lambda, bool fit_intercept = true);
LinearModel fit_elastic_net(const Matrix& x, std::span<const double> y,
                            double lambda, double alpha,
                            bool fit_intercept = true);

std::vector<double> predict(const LinearModel& model, const Matrix& x);

// Largest KKT violation of the elastic-net stationarity conditions; the
// certificate checked by tests.
double kkt_violation(const LinearModel& model, const Matrix& x,
                     std::span<const double> y);

// Binary logistic regression on +/-1 labels (class index 1 is +1).
struct LogisticModel {
  double intercept = 0.0;
  std::vector<double> coef;
  Labels classes;
  Penalty penalty = Penalty::none;
  double lambda = 0.0;
  double alpha = 0.5;
  int iterations = 0;
};

// Full-batch gradient descent with backtracking line search (initial step
// 1.0, halved until sufficient decrease); the l1 part is handled by a
// proximal soft-threshold step. Stops when the optimality residual falls
// below 1e-6, fails after 1e4 iterations.
LogisticModel fit_logistic(const Matrix& x, const Labels& labels,
                           Penalty penalty = Penalty::none,
                           double lambda = 0.0, double alpha = 0.5);

// log2(1 + exp(-y f)); 1 at the decision boundary, -> 0 for confidently
// correct predictions.
double logistic_loss(double y, double f);

// Numerically safe sigmoid.
double sigmoid(double f);

std::vector<double> decision_function(const LogisticModel& model,
                                      const Matrix& x);
std::vector<int> predict(const LogisticModel& model, const Matrix& x);
Matrix predict_proba(const LogisticModel& model, const Matrix& x);

// Objective/gradient of the penalized logistic problem at (w0, w); used by
// the solver and by finite-difference tests.
double logistic_objective(const Matrix& x, std::span<const double> ysigned,
                          double w0, std::span<const double> w,
                          Penalty penalty, double lambda, double alpha);
void logistic_smooth_gradient(const Matrix& x, std::span<const double> ysigned,
                              double w0, std::span<const double> w,
                              Penalty penalty, double lambda, double alpha,
                              double& g0, std::vector<double>& g);

std::string penalty_name(Penalty p);
Penalty penalty_from_name(const std::string& name);

}  // namespace linear
}  // namespace classicml
