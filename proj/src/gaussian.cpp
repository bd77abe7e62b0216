#include "classicml/gaussian.hpp"

#include <cmath>

#include "classicml/linalg.hpp"
#include "classicml/multiclass.hpp"

namespace classicml {
namespace gaussian {

namespace {

void add_jitter(Matrix& cov) {
  double trace = 0.0;
  for (std::size_t i = 0; i < cov.rows(); ++i) trace += cov(i, i);
  const double jitter = 1e-9 * trace / static_cast<double>(cov.rows());
  for (std::size_t i = 0; i < cov.rows(); ++i) cov(i, i) += jitter;
}

}  // namespace

GaussianClassifier fit_gaussian(const Matrix& x, const Labels& labels,
                                Kind kind) {
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  check_finite(x, "X");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const int q = labels.num_classes();
  const auto counts = labels.class_counts();
  for (int k = 0; k < q; ++k) {
    if (counts[k] < 2) {
      throw Error(ErrorCode::degenerate_labels,
                  "class " + labels.names[k] +
                      " needs at least two samples for variance estimation");
    }
  }

  GaussianClassifier model;
  model.kind = kind;
  model.classes = labels;
  model.means = Matrix(q, p);
  model.priors.resize(q);

  for (std::size_t i = 0; i < n; ++i) {
    const int k = labels.values[i];
    for (std::size_t j = 0; j < p; ++j) model.means(k, j) += x(i, j);
  }
  for (int k = 0; k < q; ++k) {
    model.priors[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j)
      model.means(k, j) /= static_cast<double>(counts[k]);
  }

  model.lin = Matrix(q, p);
  model.intercept.resize(q);

  switch (kind) {
    case Kind::nb_per_class_var: {
      // One isotropic variance per class, pooled across features.
      model.class_variance.assign(q, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const int k = labels.values[i];
        model.class_variance[k] += squared_distance(x.row(i), model.means.row(k));
      }
      model.quad.resize(q);
      for (int k = 0; k < q; ++k) {
        double var = model.class_variance[k] /
                     (static_cast<double>(counts[k]) * static_cast<double>(p));
        var += 1e-9 * var;
        if (!(var > 0.0)) {
          throw Error(ErrorCode::singular_matrix,
                      "zero within-class variance for class " +
                          labels.names[k]);
        }
        model.class_variance[k] = var;
        model.quad[k] = Matrix(p, p);
        for (std::size_t j = 0; j < p; ++j)
          model.quad[k](j, j) = -0.5 / var;
        double mu_sq = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          model.lin(k, j) = model.means(k, j) / var;
          mu_sq += model.means(k, j) * model.means(k, j);
        }
        model.intercept[k] = -0.5 * mu_sq / var - std::log(std::sqrt(var)) +
                             std::log(model.priors[k]);
      }
      break;
    }
    case Kind::nb_shared_var: {
      double pooled = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const int k = labels.values[i];
        pooled += squared_distance(x.row(i), model.means.row(k));
      }
      double var = pooled / (static_cast<double>(n) * static_cast<double>(p));
      var += 1e-9 * var;
      if (!(var > 0.0)) {
        throw Error(ErrorCode::singular_matrix,
                    "zero pooled within-class variance");
      }
      model.shared_variance = var;
      for (int k = 0; k < q; ++k) {
        double mu_sq = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          model.lin(k, j) = model.means(k, j) / var;
          mu_sq += model.means(k, j) * model.means(k, j);
        }
        model.intercept[k] = -0.5 * mu_sq / var + std::log(model.priors[k]);
      }
      break;
    }
    case Kind::lda: {
      Matrix pooled(p, p);
      for (std::size_t i = 0; i < n; ++i) {
        const int k = labels.values[i];
        for (std::size_t a = 0; a < p; ++a) {
          const double da = x(i, a) - model.means(k, a);
          for (std::size_t b = a; b < p; ++b) {
            const double db = x(i, b) - model.means(k, b);
            pooled(a, b) += da * db;
          }
        }
      }
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
          pooled(a, b) /= static_cast<double>(n);
          pooled(b, a) = pooled(a, b);
        }
      add_jitter(pooled);
      model.pooled_covariance = pooled;
      const linalg::Cholesky chol(pooled);
      for (int k = 0; k < q; ++k) {
        const auto wk = chol.solve(model.means.row(k));
        double quad_form = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          model.lin(k, j) = wk[j];
          quad_form += model.means(k, j) * wk[j];
        }
        model.intercept[k] = -0.5 * quad_form + std::log(model.priors[k]);
      }
      break;
    }
    case Kind::qda: {
      model.class_covariance.resize(q);
      model.quad.resize(q);
      for (int k = 0; k < q; ++k) {
        Matrix cov(p, p);
        for (std::size_t i = 0; i < n; ++i) {
          if (labels.values[i] != k) continue;
          for (std::size_t a = 0; a < p; ++a) {
            const double da = x(i, a) - model.means(k, a);
            for (std::size_t b = a; b < p; ++b) {
              const double db = x(i, b) - model.means(k, b);
              cov(a, b) += da * db;
            }
          }
        }
        for (std::size_t a = 0; a < p; ++a)
          for (std::size_t b = a; b < p; ++b) {
            cov(a, b) /= static_cast<double>(counts[k]);
            cov(b, a) = cov(a, b);
          }
        add_jitter(cov);
        model.class_covariance[k] = cov;
        const linalg::Cholesky chol(cov);
        // W_k = -1/2 Sigma_k^{-1}
        model.quad[k] = chol.solve(Matrix::identity(p));
        for (double& v : model.quad[k].data()) v *= -0.5;
        const auto wk = chol.solve(model.means.row(k));
        double quad_form = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
          model.lin(k, j) = wk[j];
          quad_form += model.means(k, j) * wk[j];
        }
        model.intercept[k] =
            -0.5 * quad_form - 0.5 * chol.log_det() + std::log(model.priors[k]);
      }
      break;
    }
  }
  return model;
}

std::vector<double> log_posterior_scores(const GaussianClassifier& model,
                                         std::span<const double> x) {
  if (x.size() != model.means.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  const int q = model.classes.num_classes();
  std::vector<double> scores(q);
  for (int k = 0; k < q; ++k) {
    double s = model.intercept[k] + linalg::dot(x, model.lin.row(k));
    if (!model.quad.empty()) {
      const Matrix& w = model.quad[k];
      double acc = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        for (std::size_t b = 0; b < x.size(); ++b)
          acc += x[a] * w(a, b) * x[b];
      }
      s += acc;
    }
    scores[k] = s;
  }
  return scores;
}

std::vector<double> predict_proba(const GaussianClassifier& model,
                                  std::span<const double> x) {
  return multiclass::softmax(log_posterior_scores(model, x));
}

Matrix predict_proba(const GaussianClassifier& model, const Matrix& x) {
  Matrix out(x.rows(), model.classes.num_classes());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto probs = predict_proba(model, x.row(i));
    for (std::size_t k = 0; k < probs.size(); ++k) out(i, k) = probs[k];
  }
  return out;
}

std::vector<int> predict(const GaussianClassifier& model, const Matrix& x) {
  std::vector<int> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto scores = log_posterior_scores(model, x.row(i));
    for (std::size_t k = 1; k < scores.size(); ++k)
      if (scores[k] > scores[out[i]]) out[i] = static_cast<int>(k);
  }
  return out;
}

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::nb_per_class_var: return "nb_per_class_var";
    case Kind::nb_shared_var: return "nb_shared_var";
    case Kind::lda: return "lda";
    case Kind::qda: return "qda";
  }
  return "unknown";
}

Kind kind_from_name(const std::string& name) {
  if (name == "nb_per_class_var") return Kind::nb_per_class_var;
  if (name == "nb_shared_var") return Kind::nb_shared_var;
  if (name == "lda") return Kind::lda;
  if (name == "qda") return Kind::qda;
  throw Error(ErrorCode::config, "unknown gaussian kind: " + name);
}

}  // namespace gaussian
}  // namespace classicml
