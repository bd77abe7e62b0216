#include <doctest.h>

#include <cmath>

#include "classicml/gaussian.hpp"
#include "testutil.hpp"

using namespace classicml;
using namespace classicml::gaussian;
using testutil::gaussian_blobs;
using testutil::random_matrix;

namespace {

Labels two_classes(std::vector<int> values) {
  Labels l;
  l.values = std::move(values);
  l.names = {"a", "b"};
  return l;
}

}  // namespace

TEST_CASE("fitted means and priors are the sample statistics") {
  Matrix x(10, 2);
  std::vector<int> values(10);
  for (int i = 0; i < 3; ++i) {
    x(i, 0) = 1.0 + i;
    x(i, 1) = -1.0;
    values[i] = 0;
  }
  for (int i = 3; i < 10; ++i) {
    x(i, 0) = 10.0 + i;
    x(i, 1) = 2.0;
    values[i] = 1;
  }
  const auto model = fit_gaussian(x, two_classes(values), Kind::lda);
  CHECK(model.priors[0] == doctest::Approx(0.3));
  CHECK(model.priors[1] == doctest::Approx(0.7));
  CHECK(model.means(0, 0) == doctest::Approx(2.0));
  CHECK(model.means(0, 1) == doctest::Approx(-1.0));
  CHECK(model.means(1, 0) == doctest::Approx(10.0 + 6.0));
  CHECK(model.means(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("one-dimensional boundary sits at the midpoint with equal priors") {
  // Classes drawn as N(0,1) and N(2,1): with equal priors the shared-variance
  // boundary is x = 1.
  Matrix x(8, 1, {-1.0, 1.0, -0.5, 0.5, 1.0, 3.0, 1.5, 2.5});
  const auto labels = two_classes({0, 0, 0, 0, 1, 1, 1, 1});
  const auto model = fit_gaussian(x, labels, Kind::nb_shared_var);
  // Sample means are exactly 0 and 2 with equal class sizes.
  Matrix probe(2, 1, {0.9, 1.1});
  const auto preds = predict(model, probe);
  CHECK(preds == std::vector<int>{0, 1});
}

TEST_CASE("unequal priors shift the boundary by log-odds") {
  // Plant exact moments: means 0 and 2, shared variance 1, priors 0.9/0.1.
  GaussianClassifier model;
  model.kind = Kind::nb_shared_var;
  model.classes.names = {"a", "b"};
  model.means = Matrix(2, 1, {0.0, 2.0});
  model.priors = {0.9, 0.1};
  model.shared_variance = 1.0;
  model.lin = Matrix(2, 1, {0.0, 2.0});
  model.intercept = {std::log(0.9), -2.0 + std::log(0.1)};

  const double boundary = 1.0 + std::log(9.0) / 2.0;  // ~2.0986
  Matrix probe(2, 1, {boundary - 0.01, boundary + 0.01});
  const auto preds = predict(model, probe);
  CHECK(preds == std::vector<int>{0, 1});

  // The score gap flips sign exactly at the boundary.
  const auto low = log_posterior_scores(model, probe.row(0));
  const auto high = log_posterior_scores(model, probe.row(1));
  CHECK(low[0] > low[1]);
  CHECK(high[1] > high[0]);
}

TEST_CASE("lda with isotropic pooled covariance is nearest-mean") {
  // Four-point crosses around each class center give a pooled MLE
  // covariance of exactly 0.5 I, so LDA with equal priors reduces to
  // nearest-centroid classification.
  Matrix x(8, 2);
  std::vector<int> values{0, 0, 0, 0, 1, 1, 1, 1};
  const double centers[2][2] = {{0.0, 0.0}, {6.0, 2.0}};
  for (int k = 0; k < 2; ++k) {
    const int base = 4 * k;
    x(base + 0, 0) = centers[k][0] + 1.0;
    x(base + 0, 1) = centers[k][1];
    x(base + 1, 0) = centers[k][0] - 1.0;
    x(base + 1, 1) = centers[k][1];
    x(base + 2, 0) = centers[k][0];
    x(base + 2, 1) = centers[k][1] + 1.0;
    x(base + 3, 0) = centers[k][0];
    x(base + 3, 1) = centers[k][1] - 1.0;
  }
  const auto model = fit_gaussian(x, two_classes(values), Kind::lda);
  SeededRng rng(61);
  const Matrix probe = random_matrix(40, 2, rng, -2.0, 8.0);
  const auto preds = predict(model, probe);
  for (std::size_t i = 0; i < probe.rows(); ++i) {
    const double d0 = squared_distance(probe.row(i), model.means.row(0));
    const double d1 = squared_distance(probe.row(i), model.means.row(1));
    if (d0 == d1) continue;
    CHECK(preds[i] == (d1 < d0 ? 1 : 0));
  }
}

TEST_CASE("probabilities are softmax over scores") {
  SeededRng rng(62);
  const auto blobs = gaussian_blobs(20, rng);
  for (const auto kind :
       {Kind::nb_per_class_var, Kind::nb_shared_var, Kind::lda, Kind::qda}) {
    const auto model = fit_gaussian(blobs.x, blobs.labels, kind);
    const Matrix proba = predict_proba(model, blobs.x);
    for (std::size_t i = 0; i < proba.rows(); ++i) {
      double total = 0.0;
      for (std::size_t k = 0; k < proba.cols(); ++k) {
        CHECK(proba(i, k) >= 0.0);
        total += proba(i, k);
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
    // All four kinds separate the blobs perfectly.
    CHECK(predict(model, blobs.x) == blobs.labels.values);
  }
}

TEST_CASE("saturated scores give a one-hot posterior") {
  GaussianClassifier model;
  model.kind = Kind::nb_shared_var;
  model.classes.names = {"a", "b"};
  model.means = Matrix(2, 1);
  model.priors = {0.5, 0.5};
  model.lin = Matrix(2, 1, {1e4, 0.0});
  model.intercept = {0.0, 0.0};
  const auto p = predict_proba(model, std::vector<double>{1.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("equidistant point splits the posterior evenly") {
  Matrix x(4, 1, {-2.0, -1.0, 1.0, 2.0});
  const auto labels = two_classes({0, 0, 1, 1});
  const auto model = fit_gaussian(x, labels, Kind::lda);
  const auto p = predict_proba(model, std::vector<double>{0.0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("mirrored classes make qda equal to lda") {
  SeededRng rng(63);
  // Class 1 is class 0 translated; equal sample covariance matrices.
  Matrix base = random_matrix(25, 2, rng);
  Matrix x(50, 2);
  std::vector<int> values(50);
  for (int i = 0; i < 25; ++i) {
    x(i, 0) = base(i, 0);
    x(i, 1) = base(i, 1);
    values[i] = 0;
    x(25 + i, 0) = base(i, 0) + 4.0;
    x(25 + i, 1) = base(i, 1) + 1.0;
    values[25 + i] = 1;
  }
  const auto labels = two_classes(values);
  const auto lda_model = fit_gaussian(x, labels, Kind::lda);
  const auto qda_model = fit_gaussian(x, labels, Kind::qda);
  SeededRng probe_rng(64);
  const Matrix probe = random_matrix(200, 2, probe_rng, -2.0, 6.0);
  CHECK(predict(lda_model, probe) == predict(qda_model, probe));
}

TEST_CASE("isotropic pooled covariance makes lda equal shared-variance nb") {
  // Construct data whose pooled MLE covariance is exactly sigma^2 I: points
  // placed symmetrically around each class mean along each axis.
  Matrix x(8, 2);
  std::vector<int> values{0, 0, 0, 0, 1, 1, 1, 1};
  const double centers[2][2] = {{0.0, 0.0}, {5.0, 3.0}};
  for (int k = 0; k < 2; ++k) {
    const int base = 4 * k;
    x(base + 0, 0) = centers[k][0] + 1.0;
    x(base + 0, 1) = centers[k][1];
    x(base + 1, 0) = centers[k][0] - 1.0;
    x(base + 1, 1) = centers[k][1];
    x(base + 2, 0) = centers[k][0];
    x(base + 2, 1) = centers[k][1] + 1.0;
    x(base + 3, 0) = centers[k][0];
    x(base + 3, 1) = centers[k][1] - 1.0;
  }
  const auto labels = two_classes(values);
  const auto lda_model = fit_gaussian(x, labels, Kind::lda);
  const auto nb_model = fit_gaussian(x, labels, Kind::nb_shared_var);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(lda_model.intercept[k] - nb_model.intercept[k]) <= 1e-8);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(lda_model.lin(k, j) - nb_model.lin(k, j)) <= 1e-8);
  }
}

TEST_CASE("translation leaves predictions unchanged") {
  SeededRng rng(65);
  const auto blobs = gaussian_blobs(20, rng);
  const Matrix probe = random_matrix(40, 2, rng, -2.0, 12.0);
  const double shift[2] = {13.5, -7.25};

  Matrix x_shift = blobs.x;
  for (std::size_t i = 0; i < x_shift.rows(); ++i) {
    x_shift(i, 0) += shift[0];
    x_shift(i, 1) += shift[1];
  }
  Matrix probe_shift = probe;
  for (std::size_t i = 0; i < probe.rows(); ++i) {
    probe_shift(i, 0) += shift[0];
    probe_shift(i, 1) += shift[1];
  }

  for (const auto kind :
       {Kind::nb_per_class_var, Kind::nb_shared_var, Kind::lda, Kind::qda}) {
    const auto a = fit_gaussian(blobs.x, blobs.labels, kind);
    const auto b = fit_gaussian(x_shift, blobs.labels, kind);
    CHECK(predict(a, probe) == predict(b, probe_shift));
  }
}

TEST_CASE("classes with one sample are rejected") {
  Matrix x(3, 1, {0.0, 1.0, 5.0});
  Labels labels;
  labels.values = {0, 0, 1};
  labels.names = {"a", "b"};
  CHECK_THROWS_AS(fit_gaussian(x, labels, Kind::qda), Error);
}
