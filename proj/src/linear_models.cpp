#include "classicml/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "classicml/linalg.hpp"

namespace classicml {
namespace linear {

namespace {

void check_xy(const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw Error(ErrorCode::empty_dataset, "no training rows");
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and y row counts differ");
  }
  check_finite(x, "X");
  check_finite(y, "y");
}

// Normal-equation solve on the (optionally intercept-augmented) system with
// lambda added to every non-intercept diagonal entry.
LinearModel solve_normal_equations(const Matrix& x, std::span<const double> y,
                                   double lambda, bool fit_intercept) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t off = fit_intercept ? 1 : 0;
  const std::size_t dim = p + off;

  LinearModel model;
  model.has_intercept = fit_intercept;
  model.lambda = lambda;
  if (dim == 0) return model;

  Matrix a(dim, dim);
  std::vector<double> b(dim, 0.0);
  if (fit_intercept) {
    a(0, 0) = static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x(i, j);
      a(0, j + 1) = s;
      a(j + 1, 0) = s;
    }
    for (double v : y) b[0] += v;
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j; k < p; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x(i, j) * x(i, k);
      a(j + off, k + off) = s;
      a(k + off, j + off) = s;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x(i, j) * y[i];
    b[j + off] = s;
  }
  for (std::size_t j = 0; j < p; ++j) a(j + off, j + off) += lambda;

  const auto w = linalg::solve_spd(a, b);
  if (fit_intercept) model.intercept = w[0];
  model.coef.assign(w.begin() + off, w.end());
  return model;
}

}  // namespace

LinearModel fit_ols(const Matrix& x, std::span<const double> y,
                    bool fit_intercept) {
  check_xy(x, y);
  LinearModel m = solve_normal_equations(x, y, 0.0, fit_intercept);
  m.penalty = Penalty::none;
  return m;
}

LinearModel fit_ridge(const Matrix& x, std::span<const double> y,
                      double lambda, bool fit_intercept) {
  check_xy(x, y);
  if (lambda < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "lambda must be >= 0");
  }
  LinearModel m = solve_normal_equations(x, y, lambda, fit_intercept);
  m.penalty = Penalty::l2;
  return m;
}

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

LinearModel coordinate_descent(const Matrix& x, std::span<const double> y,
                               double lambda, double alpha,
                               bool fit_intercept) {
  check_xy(x, y);
  if (lambda < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "lambda must be >= 0");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "alpha must be in [0, 1]");
  }
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();

  std::vector<double> col_sq(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col_sq[j] += x(i, j) * x(i, j);
  }

  LinearModel model;
  model.has_intercept = fit_intercept;
  model.penalty = alpha == 1.0 ? Penalty::l1 : Penalty::elastic_net;
  model.lambda = lambda;
  model.alpha = alpha;
  model.coef.assign(p, 0.0);

  std::vector<double> residual(y.begin(), y.end());
  const double l1 = lambda * alpha;
  const double l2 = lambda * (1.0 - alpha);

  constexpr int kMaxCycles = 10000;
  constexpr double kTol = 1e-8;
  for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
    double max_change = 0.0;
    if (fit_intercept) {
      double mean_r = 0.0;
      for (double r : residual) mean_r += r;
      mean_r /= static_cast<double>(n);
      model.intercept += mean_r;
      for (double& r : residual) r -= mean_r;
      max_change = std::abs(mean_r);
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double denom = col_sq[j] + l2;
      if (denom == 0.0) continue;
      double rho = 0.0;
      for (std::size_t i = 0; i < n; ++i) rho += x(i, j) * residual[i];
      rho += col_sq[j] * model.coef[j];
      const double next = soft_threshold(rho, l1 / 2.0) / denom;
      const double delta = next - model.coef[j];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) residual[i] -= delta * x(i, j);
        model.coef[j] = next;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (max_change <= kTol) return model;
  }

  std::vector<double> last = model.coef;
  last.push_back(model.intercept);
  throw ConvergenceError("coordinate descent did not converge", std::move(last));
}

}  // namespace

LinearModel fit_lasso(const Matrix& x, std::span<const double> y,
                      double lambda, bool fit_intercept) {
  return coordinate_descent(x, y, lambda, 1.0, fit_intercept);
}

LinearModel fit_elastic_net(const Matrix& x, std::span<const double> y,
                            double lambda, double alpha, bool fit_intercept) {
  return coordinate_descent(x, y, lambda, alpha, fit_intercept);
}

std::vector<double> predict(const LinearModel& model, const Matrix& x) {
  if (x.cols() != model.coef.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  std::vector<double> out(x.rows(), model.intercept);
  for (std::size_t i = 0; i < x.rows(); ++i)
    out[i] += linalg::dot(x.row(i), model.coef);
  return out;
}

double kkt_violation(const LinearModel& model, const Matrix& x,
                     std::span<const double> y) {
  const auto yhat = predict(model, x);
  std::vector<double> residual(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - yhat[i];

  double l1 = 0.0, l2 = 0.0;
  switch (model.penalty) {
    case Penalty::none: break;
    case Penalty::l2: l2 = model.lambda; break;
    case Penalty::l1: l1 = model.lambda; break;
    case Penalty::elastic_net:
      l1 = model.lambda * model.alpha;
      l2 = model.lambda * (1.0 - model.alpha);
      break;
  }

  double worst = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double grad = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
      grad += x(i, j) * residual[i];
    grad *= 2.0;
    const double w = model.coef[j];
    double violation;
    if (w == 0.0) {
      violation = std::max(0.0, std::abs(grad) - l1);
    } else {
      violation = std::abs(grad - l1 * (w > 0.0 ? 1.0 : -1.0) - 2.0 * l2 * w);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

double logistic_loss(double y, double f) {
  if (y != 1.0 && y != -1.0) {
    throw Error(ErrorCode::degenerate_labels, "label must be +1 or -1");
  }
  const double t = -y * f;
  // log(1 + exp(t)) without overflow.
  const double softplus = t > 0.0 ? t + std::log1p(std::exp(-t))
                                  : std::log1p(std::exp(t));
  return softplus / std::numbers::ln2;
}

namespace {

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double smooth_loss(const Matrix& x, std::span<const double> ysigned, double w0,
                   std::span<const double> w, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double f = w0 + linalg::dot(x.row(i), w);
    loss += softplus(-ysigned[i] * f);
  }
  for (double v : w) loss += l2 * v * v;
  return loss;
}

void penalty_weights(Penalty penalty, double lambda, double alpha, double& l1,
                     double& l2) {
  l1 = 0.0;
  l2 = 0.0;
  switch (penalty) {
    case Penalty::none: break;
    case Penalty::l2: l2 = lambda; break;
    case Penalty::l1: l1 = lambda; break;
    case Penalty::elastic_net:
      l1 = lambda * alpha;
      l2 = lambda * (1.0 - alpha);
      break;
  }
}

}  // namespace

double logistic_objective(const Matrix& x, std::span<const double> ysigned,
                          double w0, std::span<const double> w,
                          Penalty penalty, double lambda, double alpha) {
  double l1, l2;
  penalty_weights(penalty, lambda, alpha, l1, l2);
  double obj = smooth_loss(x, ysigned, w0, w, l2);
  for (double v : w) obj += l1 * std::abs(v);
  return obj;
}

void logistic_smooth_gradient(const Matrix& x, std::span<const double> ysigned,
                              double w0, std::span<const double> w,
                              Penalty penalty, double lambda, double alpha,
                              double& g0, std::vector<double>& g) {
  double l1, l2;
  penalty_weights(penalty, lambda, alpha, l1, l2);
  g0 = 0.0;
  g.assign(w.size(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double f = w0 + linalg::dot(x.row(i), w);
    const double c = -ysigned[i] * sigmoid(-ysigned[i] * f);
    g0 += c;
    const auto row = x.row(i);
    for (std::size_t j = 0; j < w.size(); ++j) g[j] += c * row[j];
  }
  for (std::size_t j = 0; j < w.size(); ++j) g[j] += 2.0 * l2 * w[j];
}

LogisticModel fit_logistic(const Matrix& x, const Labels& labels,
                           Penalty penalty, double lambda, double alpha) {
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  if (labels.num_classes() != 2) {
    throw Error(ErrorCode::degenerate_labels,
                "logistic regression needs exactly two classes");
  }
  if (lambda < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "lambda must be >= 0");
  }
  check_finite(x, "X");

  const std::size_t p = x.cols();
  const std::vector<double> y = labels.signed_values();
  double l1, l2;
  penalty_weights(penalty, lambda, alpha, l1, l2);

  double w0 = 0.0;
  std::vector<double> w(p, 0.0);
  double g0;
  std::vector<double> g;

  constexpr int kMaxIters = 10000;
  constexpr double kTol = 1e-6;
  int iter = 0;
  for (; iter < kMaxIters; ++iter) {
    logistic_smooth_gradient(x, y, w0, w, penalty, lambda, alpha, g0, g);

    // Optimality residual: plain gradient where the objective is smooth,
    // distance of zero from the subdifferential on the l1 part.
    double residual = std::abs(g0);
    for (std::size_t j = 0; j < p; ++j) {
      if (l1 > 0.0) {
        residual = std::max(residual,
                            w[j] != 0.0
                                ? std::abs(g[j] + l1 * (w[j] > 0 ? 1.0 : -1.0))
                                : std::max(0.0, std::abs(g[j]) - l1));
      } else {
        residual = std::max(residual, std::abs(g[j]));
      }
    }
    if (residual <= kTol) break;

    const double smooth_here = smooth_loss(x, y, w0, w, l2);
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-20) {
      double cand0 = w0 - step * g0;
      std::vector<double> cand(p);
      for (std::size_t j = 0; j < p; ++j) {
        cand[j] = l1 > 0.0 ? soft_threshold(w[j] - step * g[j], step * l1)
                           : w[j] - step * g[j];
      }
      double dsq = (cand0 - w0) * (cand0 - w0);
      double gdot = g0 * (cand0 - w0);
      for (std::size_t j = 0; j < p; ++j) {
        const double d = cand[j] - w[j];
        dsq += d * d;
        gdot += g[j] * d;
      }
      const double smooth_cand = smooth_loss(x, y, cand0, cand, l2);
      // Majorization test; for the smooth case this is at least as strict
      // as Armijo with c = 1/2.
      if (smooth_cand <= smooth_here + gdot + dsq / (2.0 * step)) {
        w0 = cand0;
        w = std::move(cand);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: no further progress possible
  }

  if (iter == kMaxIters) {
    std::vector<double> last = w;
    last.push_back(w0);
    throw ConvergenceError("logistic regression did not converge",
                           std::move(last));
  }

  LogisticModel model;
  model.intercept = w0;
  model.coef = std::move(w);
  model.classes = labels;
  model.penalty = penalty;
  model.lambda = lambda;
  model.alpha = alpha;
  model.iterations = iter;
  return model;
}

std::vector<double> decision_function(const LogisticModel& model,
                                      const Matrix& x) {
  if (x.cols() != model.coef.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  std::vector<double> out(x.rows(), model.intercept);
  for (std::size_t i = 0; i < x.rows(); ++i)
    out[i] += linalg::dot(x.row(i), model.coef);
  return out;
}

std::vector<int> predict(const LogisticModel& model, const Matrix& x) {
  const auto f = decision_function(model, x);
  std::vector<int> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0 ? 1 : 0;
  return out;
}

Matrix predict_proba(const LogisticModel& model, const Matrix& x) {
  const auto f = decision_function(model, x);
  Matrix out(f.size(), 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double p1 = sigmoid(f[i]);
    out(i, 1) = p1;
    out(i, 0) = 1.0 - p1;  // exact complement
  }
  return out;
}

std::string penalty_name(Penalty p) {
  switch (p) {
    case Penalty::none: return "none";
    case Penalty::l2: return "l2";
    case Penalty::l1: return "l1";
    case Penalty::elastic_net: return "elasticnet";
  }
  return "unknown";
}

Penalty penalty_from_name(const std::string& name) {
  if (name == "none") return Penalty::none;
  if (name == "l2") return Penalty::l2;
  if (name == "l1") return Penalty::l1;
  if (name == "elasticnet") return Penalty::elastic_net;
  throw Error(ErrorCode::config, "unknown penalty: " + name);
}

}  // namespace linear
}  // namespace classicml
