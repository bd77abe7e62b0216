#include "classicml/svm.hpp"

#include <cmath>

#include "classicml/linalg.hpp"
#include "classicml/parallel.hpp"

namespace classicml {
namespace svm {

double hinge_loss(double y, double f) {
  if (y != 1.0 && y != -1.0) {
    throw Error(ErrorCode::degenerate_labels, "label must be +1 or -1");
  }
  return std::max(0.0, 1.0 - y * f);
}

double eps_insensitive_loss(double y, double f, double epsilon) {
  if (epsilon < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "epsilon must be >= 0");
  }
  return std::max(0.0, std::abs(y - f) - epsilon);
}

namespace {

// Neumaier-compensated sum. The dual iterates can transiently reach large
// magnitudes where a naive objective accumulation loses enough precision to
// corrupt best-iterate tracking.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> gram_times(const Matrix& k, std::span<const double> a) {
  std::vector<double> f(k.rows(), 0.0);
  parallel_for(k.rows(), [&](std::size_t i) {
    CompensatedSum s;
    const auto row = k.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) s.add(row[j] * a[j]);
    f[i] = s.value();
  });
  return f;
}

double quad_term(std::span<const double> a, std::span<const double> f,
                 double c) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * f[i]);
  return s.value() / (2.0 * c);
}

}  // namespace

double svc_objective(const Matrix& gram, std::span<const double> ysigned,
                     std::span<const double> alpha, double c) {
  const auto f = gram_times(gram, alpha);
  CompensatedSum loss;
  for (std::size_t i = 0; i < ysigned.size(); ++i) {
    loss.add(std::max(0.0, 1.0 - ysigned[i] * f[i]));
  }
  return loss.value() + quad_term(alpha, f, c);
}

double svr_objective(const Matrix& gram, std::span<const double> y,
                     std::span<const double> alpha, double c, double epsilon) {
  const auto f = gram_times(gram, alpha);
  CompensatedSum loss;
  for (std::size_t i = 0; i < y.size(); ++i) {
    loss.add(std::max(0.0, std::abs(y[i] - f[i]) - epsilon));
  }
  return loss.value() + quad_term(alpha, f, c);
}

namespace {

SvmModel finalize(const Matrix& x, std::vector<double> alpha, double obj,
                  int iterations) {
  SvmModel model;
  model.alpha = std::move(alpha);
  model.objective = obj;
  model.iterations = iterations;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < model.alpha.size(); ++i) {
    if (std::abs(model.alpha[i]) > kSupportThreshold) {
      model.support_indices.push_back(static_cast<int>(i));
      rows.emplace_back(x.row(i).begin(), x.row(i).end());
    }
  }
  model.support_vectors =
      rows.empty() ? Matrix(0, x.cols()) : Matrix::from_rows(rows);
  return model;
}

}  // namespace

SvmModel fit_svc(const Matrix& x, const Labels& labels,
                 const kernels::KernelSpec& spec, double c, int iterations) {
  if (labels.num_classes() != 2) {
    throw Error(ErrorCode::degenerate_labels,
                "SVM classification needs exactly two classes");
  }
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  if (!(c > 0.0)) {
    throw Error(ErrorCode::invalid_hyperparameter, "C must be > 0");
  }
  check_finite(x, "X");
  kernels::validate(spec);

  const std::vector<double> y = labels.signed_values();
  const Matrix k = kernels::gram(spec, x, x);
  const std::size_t n = x.rows();

  std::vector<double> alpha(n, 0.0);
  std::vector<double> best = alpha;
  double best_obj = static_cast<double>(n);  // J(0): every hinge equals 1

  for (int t = 1; t <= iterations; ++t) {
    const std::vector<double> f = gram_times(k, alpha);
    // Loss subgradient is sum_i mult_i K_i; the quadratic term adds K
    // alpha / C, which is f / C.
    std::vector<double> mult(n);
    for (std::size_t i = 0; i < n; ++i) {
      mult[i] = y[i] * f[i] < 1.0 ? -y[i] : 0.0;
    }
    const std::vector<double> g = gram_times(k, mult);
    const double step = c / std::sqrt(static_cast<double>(t));
    for (std::size_t i = 0; i < n; ++i)
      alpha[i] -= step * (g[i] + f[i] / c);

    const double obj = svc_objective(k, y, alpha, c);
    if (std::isfinite(obj) && obj < best_obj) {
      best_obj = obj;
      best = alpha;
    }
  }

  SvmModel model = finalize(x, std::move(best), best_obj, iterations);
  model.regression = false;
  model.kernel = spec;
  model.c = c;
  model.classes = labels;
  return model;
}

SvmModel fit_svr(const Matrix& x, std::span<const double> y,
                 const kernels::KernelSpec& spec, double c, double epsilon,
                 int iterations) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and y row counts differ");
  }
  if (!(c > 0.0)) {
    throw Error(ErrorCode::invalid_hyperparameter, "C must be > 0");
  }
  if (epsilon < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "epsilon must be >= 0");
  }
  check_finite(x, "X");
  check_finite(y, "y");
  kernels::validate(spec);

  const Matrix k = kernels::gram(spec, x, x);
  const std::size_t n = x.rows();

  std::vector<double> alpha(n, 0.0);
  std::vector<double> best = alpha;
  double best_obj = svr_objective(k, y, alpha, c, epsilon);

  for (int t = 1; t <= iterations; ++t) {
    const std::vector<double> f = gram_times(k, alpha);
    std::vector<double> mult(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f[i];
      mult[i] = std::abs(r) > epsilon ? (r > 0.0 ? -1.0 : 1.0) : 0.0;
    }
    const std::vector<double> g = gram_times(k, mult);
    const double step = c / std::sqrt(static_cast<double>(t));
    for (std::size_t i = 0; i < n; ++i)
      alpha[i] -= step * (g[i] + f[i] / c);

    const double obj = svr_objective(k, y, alpha, c, epsilon);
    if (std::isfinite(obj) && obj < best_obj) {
      best_obj = obj;
      best = alpha;
    }
  }

  SvmModel model = finalize(x, std::move(best), best_obj, iterations);
  model.regression = true;
  model.kernel = spec;
  model.c = c;
  model.epsilon = epsilon;
  return model;
}

std::vector<double> svm_decision(const SvmModel& model, const Matrix& x) {
  if (x.cols() != model.support_vectors.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  std::vector<double> out(x.rows(), 0.0);
  if (model.support_indices.empty()) return out;
  const Matrix cross = kernels::gram(model.kernel, x, model.support_vectors);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < model.support_indices.size(); ++j) {
      s += model.alpha[model.support_indices[j]] * cross(i, j);
    }
    out[i] = s;
  }
  return out;
}

std::vector<int> svm_predict(const SvmModel& model, const Matrix& x) {
  if (model.regression) {
    throw Error(ErrorCode::config, "svm_predict applies to classification");
  }
  const auto scores = svm_decision(model, x);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    out[i] = scores[i] > 0.0 ? 1 : 0;
  return out;
}

}  // namespace svm
}  // namespace classicml
