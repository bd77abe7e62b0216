#include <doctest.h>

#include <cmath>

#include "classicml/svm.hpp"
#include "testutil.hpp"

using namespace classicml;
using namespace classicml::svm;
using kernels::KernelKind;
using kernels::KernelSpec;
using testutil::random_matrix;

namespace {

Labels binary(std::vector<int> values) {
  Labels l;
  l.values = std::move(values);
  l.names = {"neg", "pos"};
  return l;
}

}  // namespace

TEST_CASE("hinge and epsilon-insensitive losses") {
  CHECK(hinge_loss(1.0, 2.0) == 0.0);
  CHECK(hinge_loss(1.0, 0.5) == doctest::Approx(0.5));
  CHECK(hinge_loss(-1.0, 0.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(hinge_loss(0.0, 1.0), Error);

  CHECK(eps_insensitive_loss(1.0, 1.2, 0.5) == 0.0);
  CHECK(eps_insensitive_loss(3.0, 1.0, 0.5) == doctest::Approx(1.5));
  CHECK(eps_insensitive_loss(3.0, 1.0, 0.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(eps_insensitive_loss(1.0, 1.0, -0.1), Error);
}

TEST_CASE("two-point problem agrees with a dense grid oracle") {
  Matrix x(2, 1, {-1.0, 1.0});
  const auto labels = binary({0, 1});
  const KernelSpec lin{KernelKind::linear, 1.0, 0.0, 3};
  const double c = 10.0;

  // Oracle: scan alpha over a fine grid and keep the best objective.
  const Matrix k = kernels::gram(lin, x, x);
  const std::vector<double> y{-1.0, 1.0};
  double best_obj = 1e300;
  std::vector<double> best_alpha(2, 0.0);
  for (double a0 = -c; a0 <= c; a0 += 0.01) {
    for (double a1 = -c; a1 <= c; a1 += 0.01) {
      const std::vector<double> alpha{a0, a1};
      const double obj = svc_objective(k, y, alpha, c);
      if (obj < best_obj) {
        best_obj = obj;
        best_alpha = alpha;
      }
    }
  }
  // Oracle decision signs: f(-1) < 0 < f(+1).
  const double f0 = k(0, 0) * best_alpha[0] + k(0, 1) * best_alpha[1];
  const double f1 = k(1, 0) * best_alpha[0] + k(1, 1) * best_alpha[1];
  REQUIRE(f0 < 0.0);
  REQUIRE(f1 > 0.0);

  const auto model = fit_svc(x, labels, lin, c);
  const auto scores = svm_decision(model, x);
  CHECK(scores[0] < 0.0);
  CHECK(scores[1] > 0.0);
  CHECK(model.objective <= best_obj + 0.05);
}

TEST_CASE("rbf svc solves xor") {
  Matrix x(4, 2, {0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0});
  const auto labels = binary({0, 0, 1, 1});
  const auto model =
      fit_svc(x, labels, KernelSpec{KernelKind::rbf, 1.0, 0.0, 3}, 100.0);
  const auto preds = svm_predict(model, x);
  CHECK(preds == std::vector<int>{0, 0, 1, 1});
  CHECK(model.objective <= 4.0);
}

TEST_CASE("objective of the returned iterate never exceeds the zero vector") {
  SeededRng rng(41);
  const Matrix x = random_matrix(20, 2, rng);
  Labels labels;
  labels.names = {"neg", "pos"};
  for (int i = 0; i < 20; ++i)
    labels.values.push_back(static_cast<int>(rng.uniform_int(2)));
  const auto model =
      fit_svc(x, labels, KernelSpec{KernelKind::rbf, 1.0, 0.0, 3}, 2.0, 500);
  CHECK(model.objective <= 20.0);
}

TEST_CASE("strictly separable margin sets reach full training accuracy") {
  // Two clusters hugging the margin at |x| >= 0.5, n <= 40, C = 100,
  // linear kernel, default iterations.
  SeededRng rng(42);
  for (const int per_side : {3, 10, 20}) {
    const int n = 2 * per_side;
    Matrix x(n, 2);
    std::vector<int> values(n);
    for (int i = 0; i < per_side; ++i) {
      x(i, 0) = -(0.5 + 0.2 * rng.next_double());
      x(i, 1) = 0.1 * (2.0 * rng.next_double() - 1.0);
      values[i] = 0;
      x(per_side + i, 0) = 0.5 + 0.2 * rng.next_double();
      x(per_side + i, 1) = 0.1 * (2.0 * rng.next_double() - 1.0);
      values[per_side + i] = 1;
    }
    const auto model = fit_svc(x, binary(values),
                               KernelSpec{KernelKind::linear, 1.0, 0.0, 3},
                               100.0);
    const auto preds = svm_predict(model, x);
    CHECK(preds == values);
  }
}

TEST_CASE("svr objectives") {
  const KernelSpec rbf{KernelKind::rbf, 1.0, 0.0, 3};

  // Targets already inside the tube: alpha = 0 is optimal with objective 0.
  Matrix x(3, 1, {0.0, 1.0, 2.0});
  const std::vector<double> small{0.05, -0.02, 0.01};
  const auto inside = fit_svr(x, small, rbf, 1.0, 0.1, 200);
  CHECK(inside.objective == 0.0);
  CHECK(inside.support_indices.empty());

  // Constant targets: objective bounded by the alpha = 0 value.
  const std::vector<double> constant{2.0, 2.0, 2.0};
  const auto level = fit_svr(x, constant, rbf, 10.0, 0.5, 2000);
  CHECK(level.objective <= 3.0 * 2.0);

  // A linear trend under the linear kernel beats the zero solution.
  Matrix xs(8, 1);
  std::vector<double> trend(8);
  for (int i = 0; i < 8; ++i) {
    xs(i, 0) = -0.7 + 0.2 * i;
    trend[i] = 1.5 * xs(i, 0);
  }
  const KernelSpec lin{KernelKind::linear, 1.0, 0.0, 3};
  const auto model = fit_svr(xs, trend, lin, 10.0, 0.05);
  const Matrix k = kernels::gram(lin, xs, xs);
  double zero_obj = 0.0;
  for (double v : trend) zero_obj += std::max(0.0, std::abs(v) - 0.05);
  CHECK(model.objective < zero_obj);
  const auto preds = svm_decision(model, xs);
  double fit_max = 0.0;
  for (std::size_t i = 0; i < 8; ++i)
    fit_max = std::max(fit_max, std::abs(trend[i] - preds[i]));
  double zero_max = 0.0;
  for (double v : trend) zero_max = std::max(zero_max, std::abs(v));
  CHECK(fit_max < zero_max);
}

TEST_CASE("decision uses only the support set") {
  SeededRng rng(43);
  const Matrix x = random_matrix(25, 2, rng);
  Labels labels;
  labels.names = {"neg", "pos"};
  for (int i = 0; i < 25; ++i) labels.values.push_back(x(i, 0) > 0.0 ? 1 : 0);
  const KernelSpec rbf{KernelKind::rbf, 0.8, 0.0, 3};
  const auto model = fit_svc(x, labels, rbf, 5.0, 2000);

  // Support set is exactly the |alpha| > 1e-9 rows.
  for (std::size_t i = 0, s = 0; i < model.alpha.size(); ++i) {
    const bool in_support =
        s < model.support_indices.size() &&
        model.support_indices[s] == static_cast<int>(i);
    CHECK(in_support == (std::abs(model.alpha[i]) > kSupportThreshold));
    if (in_support) ++s;
  }

  // Full-alpha evaluation agrees with the support-only path.
  const Matrix queries = random_matrix(10, 2, rng);
  const auto support_only = svm_decision(model, queries);
  const Matrix cross = kernels::gram(rbf, queries, x);
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    double full = 0.0;
    for (std::size_t j = 0; j < x.rows(); ++j)
      full += model.alpha[j] * cross(i, j);
    CHECK(std::abs(full - support_only[i]) <=
          1e-9 * static_cast<double>(x.rows()));
  }
}

TEST_CASE("all-zero duals predict the negative class") {
  SvmModel model;
  model.kernel = KernelSpec{KernelKind::linear, 1.0, 0.0, 3};
  model.alpha = {0.0, 0.0};
  model.support_vectors = Matrix(0, 1);
  const Matrix x(3, 1, {1.0, -2.0, 0.0});
  const auto scores = svm_decision(model, x);
  for (double s : scores) CHECK(s == 0.0);
  const auto preds = svm_predict(model, x);
  CHECK(preds == std::vector<int>{0, 0, 0});
}

TEST_CASE("single support vector with a linear kernel scores x . x1") {
  SvmModel model;
  model.kernel = KernelSpec{KernelKind::linear, 1.0, 0.0, 3};
  model.alpha = {1.0};
  model.support_indices = {0};
  model.support_vectors = Matrix(1, 2, {2.0, -1.0});
  const Matrix x(1, 2, {3.0, 4.0});
  const auto scores = svm_decision(model, x);
  CHECK(scores[0] == doctest::Approx(2.0 * 3.0 - 4.0));
}

TEST_CASE("mixed-task and label preconditions") {
  Matrix x(3, 1, {0.0, 1.0, 2.0});
  Labels same;
  same.values = {0, 0, 0};
  same.names = {"only"};
  CHECK_THROWS_AS(
      fit_svc(x, same, KernelSpec{KernelKind::linear, 1.0, 0.0, 3}, 1.0),
      Error);
  CHECK_THROWS_AS(fit_svr(x, std::vector<double>{1.0, 2.0, 3.0},
                          KernelSpec{KernelKind::rbf, 1.0, 0.0, 3}, -1.0, 0.1),
                  Error);
}
