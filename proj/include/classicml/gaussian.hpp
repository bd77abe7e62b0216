#pragma once

#include <optional>
#include <string>
#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace gaussian {

enum class Kind { nb_per_class_var, nb_shared_var, lda, qda };

// Generative Gaussian classifier. All four kinds score a point with
//   score_k = x^T W_k x + x^T w_k + w0k
// where the coefficients come from (mu_k, Sigma, pi_k); the class-independent
// remainder is never computed since softmax over scores ignores it. For the
// two linear kinds (shared-variance naive Bayes and LDA) W_k is absent.
struct GaussianClassifier {
  Kind kind = Kind::lda;
  Labels classes;
  Matrix means;                 // q x p
  std::vector<double> priors;   // q, sums to 1

  // Fitted covariance representation (one of these, by kind):
  std::vector<double> class_variance;  // nb_per_class_var: sigma_k^2
  double shared_variance = 0.0;        // nb_shared_var: sigma^2
  Matrix pooled_covariance;            // lda
  std::vector<Matrix> class_covariance;  // qda

  // Decision coefficients.
  std::vector<Matrix> quad;      // W_k (empty for linear kinds)
  Matrix lin;                    // q x p, rows are w_k
  std::vector<double> intercept;  // w0k

  bool is_linear() const {
    return kind == Kind::nb_shared_var || kind == Kind::lda;
  }
};

GaussianClassifier fit_gaussian(const Matrix& x, const Labels& labels,
                                Kind kind);

std::vector<double> log_posterior_scores(const GaussianClassifier& model,
                                         std::span<const double> x);
std::vector<double> predict_proba(const GaussianClassifier& model,
                                  std::span<const double> x);
Matrix predict_proba(const GaussianClassifier& model, const Matrix& x);
std::vector<int> predict(const GaussianClassifier& model, const Matrix& x);

std::string kind_name(Kind kind);
Kind kind_from_name(const std::string& name);

}  // namespace gaussian
}  // namespace classicml
