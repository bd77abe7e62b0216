#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "classicml/core.hpp"
#include "classicml/linear_models.hpp"
#include "classicml/svm.hpp"

namespace classicml {
namespace multiclass {

std::vector<double> softmax(std::span<const double> scores);

// Multinomial logistic regression: one weight vector (plus intercept) per
// class, probabilities via softmax, cross-entropy loss with an optional l2
// penalty on the non-intercept weights.
struct MultinomialModel {
  Matrix weights;  // q x (p+1); column 0 holds the intercepts
  Labels classes;
  double lambda = 0.0;
  int iterations = 0;
};

MultinomialModel fit_multinomial(const Matrix& x, const Labels& labels,
                                 double lambda_l2);

Matrix multinomial_scores(const MultinomialModel& model, const Matrix& x);
Matrix multinomial_proba(const MultinomialModel& model, const Matrix& x);
std::vector<int> multinomial_predict(const MultinomialModel& model,
                                     const Matrix& x);

double multinomial_objective(const Matrix& x, const Labels& labels,
                             const Matrix& weights, double lambda);
Matrix multinomial_gradient(const Matrix& x, const Labels& labels,
                            const Matrix& weights, double lambda);

// Binary base learners for the meta strategies. Both expose a decision
// score, which one-vs-rest confidence semantics and one-vs-one tie breaking
// require.
struct BinaryBaseSpec {
  enum class Kind { logistic, svc } kind = Kind::logistic;
  // logistic
  linear::Penalty penalty = linear::Penalty::l2;
  double lambda = 1e-3;
  double alpha = 0.5;
  // svc
  kernels::KernelSpec kernel;
  double c = 1.0;
  int iterations = 5000;
};

struct BinaryBaseModel {
  std::variant<linear::LogisticModel, svm::SvmModel> model;

  std::vector<double> decision(const Matrix& x) const;
};

// `binary` must have exactly two classes with index 0 the negative class.
BinaryBaseModel fit_binary_base(const BinaryBaseSpec& spec, const Matrix& x,
                                const Labels& binary);

struct OvrModel {
  BinaryBaseSpec base;
  std::vector<BinaryBaseModel> models;  // one per class
  Labels classes;
};

OvrModel ovr_fit(const Matrix& x, const Labels& labels,
                 const BinaryBaseSpec& base);
Matrix ovr_decision(const OvrModel& model, const Matrix& x);
std::vector<int> ovr_predict(const OvrModel& model, const Matrix& x);

struct OvoModel {
  BinaryBaseSpec base;
  std::vector<std::pair<int, int>> pairs;  // (j, k), j < k; +1 means class k
  std::vector<BinaryBaseModel> models;
  Labels classes;
};

OvoModel ovo_fit(const Matrix& x, const Labels& labels,
                 const BinaryBaseSpec& base);
std::vector<int> ovo_predict(const OvoModel& model, const Matrix& x);

// Error-correcting output codes with a +/-1 code book sampled uniformly at
// random, resampled until no two rows coincide and no column is constant.
struct EcocModel {
  BinaryBaseSpec base;
  Matrix codebook;  // q x m
  std::vector<BinaryBaseModel> models;
  Labels classes;
  std::uint64_t seed = 0;
};

Matrix sample_codebook(int q, int m, std::uint64_t seed);

EcocModel ecoc_fit(const Matrix& x, const Labels& labels,
                   const BinaryBaseSpec& base, int m, std::uint64_t seed);
std::vector<int> ecoc_predict(const EcocModel& model, const Matrix& x);

// Decision rule shared with tests: class whose code row is nearest to the
// score vector in Euclidean distance, ties to the lowest class index.
int nearest_code_row(const Matrix& codebook, std::span<const double> scores);

}  // namespace multiclass
}  // namespace classicml
