#include <doctest.h>

#include <cmath>

#include "classicml/linear_models.hpp"
#include "testutil.hpp"

using namespace classicml;
using namespace classicml::linear;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

// Well-conditioned random regression problem with a planted solution.
struct Problem {
  Matrix x;
  std::vector<double> y;
};

Problem random_problem(std::size_t n, std::size_t p, SeededRng& rng,
                       double noise = 0.1) {
  Problem prob;
  prob.x = random_matrix(n, p, rng);
  const auto w = random_vector(p, rng, -2.0, 2.0);
  const double w0 = rng.next_double() * 2.0 - 1.0;
  prob.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = w0;
    for (std::size_t j = 0; j < p; ++j) f += prob.x(i, j) * w[j];
    prob.y[i] = f + noise * (rng.next_double() * 2.0 - 1.0);
  }
  return prob;
}

}  // namespace

TEST_CASE("ols fits an exact line through two points") {
  Matrix x(2, 1, {0.0, 1.0});
  const std::vector<double> y{1.0, 3.0};
  const auto model = fit_ols(x, y);
  CHECK(model.intercept == doctest::Approx(1.0));
  CHECK(model.coef[0] == doctest::Approx(2.0));
}

TEST_CASE("ols recovers a noiseless planted model") {
  SeededRng rng(21);
  const Matrix x = random_matrix(40, 5, rng);
  const auto w_true = random_vector(5, rng);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    y[i] = 0.7;
    for (std::size_t j = 0; j < 5; ++j) y[i] += x(i, j) * w_true[j];
  }
  const auto model = fit_ols(x, y);
  CHECK(model.intercept == doctest::Approx(0.7).epsilon(1e-8));
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(model.coef[j] == doctest::Approx(w_true[j]).epsilon(1e-8));
}

TEST_CASE("intercept-only regression returns the mean") {
  Matrix x(4, 0);
  const std::vector<double> y{1.0, 2.0, 3.0, 6.0};
  const auto model = fit_ols(x, y);
  CHECK(model.intercept == doctest::Approx(3.0));
  CHECK(model.coef.empty());
}

TEST_CASE("ols residual orthogonality on random problems") {
  SeededRng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto prob = random_problem(30 + rng.uniform_int(170),
                                     1 + rng.uniform_int(19), rng, 0.5);
    const auto model = fit_ols(prob.x, prob.y);
    const auto yhat = predict(model, prob.x);

    double xmax = 0.0, ymax = 0.0;
    for (double v : prob.x.data()) xmax = std::max(xmax, std::abs(v));
    for (double v : prob.y) ymax = std::max(ymax, std::abs(v));

    double intercept_grad = 0.0;
    for (std::size_t i = 0; i < prob.y.size(); ++i)
      intercept_grad += prob.y[i] - yhat[i];
    CHECK(std::abs(intercept_grad) <= 1e-8 * std::max(1.0, ymax) *
                                          static_cast<double>(prob.y.size()));
    for (std::size_t j = 0; j < prob.x.cols(); ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < prob.y.size(); ++i)
        g += prob.x(i, j) * (prob.y[i] - yhat[i]);
      CHECK(std::abs(g) <=
            1e-8 * std::max(1.0, xmax * ymax) *
                static_cast<double>(prob.y.size()));
    }
  }
}

TEST_CASE("ridge single-sample shrinkage and the lambda=0 reduction") {
  Matrix x(1, 1, {1.0});
  const std::vector<double> y{2.0};
  const auto model = fit_ridge(x, y, 1.0, /*fit_intercept=*/false);
  CHECK(model.coef[0] == doctest::Approx(1.0));

  SeededRng rng(23);
  const auto prob = random_problem(50, 6, rng);
  const auto ridge0 = fit_ridge(prob.x, prob.y, 0.0);
  const auto ols = fit_ols(prob.x, prob.y);
  CHECK(std::abs(ridge0.intercept - ols.intercept) <= 1e-10);
  CHECK(testutil::max_abs_diff(ridge0.coef, ols.coef) <= 1e-10);
}

TEST_CASE("huge ridge penalty shrinks coefficients to nearly zero") {
  SeededRng rng(24);
  const auto prob = random_problem(60, 4, rng);
  const auto ols = fit_ols(prob.x, prob.y);
  const auto heavy = fit_ridge(prob.x, prob.y, 1e8);
  double heavy_norm = 0.0, ols_norm = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    heavy_norm += heavy.coef[j] * heavy.coef[j];
    ols_norm += ols.coef[j] * ols.coef[j];
  }
  CHECK(std::sqrt(heavy_norm) <= 1e-4 * std::sqrt(ols_norm));
}

TEST_CASE("ridge normal-equation residual") {
  SeededRng rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const auto prob = random_problem(40 + rng.uniform_int(160),
                                     2 + rng.uniform_int(18), rng, 0.4);
    const double lambda = 0.1 + rng.next_double() * 5.0;
    const auto model = fit_ridge(prob.x, prob.y, lambda);
    const auto yhat = predict(model, prob.x);
    double scale = 0.0;
    double intercept_grad = 0.0;
    for (std::size_t i = 0; i < prob.y.size(); ++i) {
      intercept_grad += prob.y[i] - yhat[i];
      scale = std::max(scale, std::abs(prob.y[i]));
    }
    CHECK(std::abs(intercept_grad) <=
          1e-8 * std::max(1.0, scale) * static_cast<double>(prob.y.size()));
    for (std::size_t j = 0; j < prob.x.cols(); ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < prob.y.size(); ++i)
        g += prob.x(i, j) * (prob.y[i] - yhat[i]);
      g -= lambda * model.coef[j];
      CHECK(std::abs(g) <=
            1e-8 * std::max(1.0, scale) * static_cast<double>(prob.y.size()));
    }
  }
}

TEST_CASE("lasso soft-threshold on a single feature") {
  Matrix x(1, 1, {1.0});
  const std::vector<double> y{3.0};
  const auto keep = fit_lasso(x, y, 2.0, /*fit_intercept=*/false);
  CHECK(keep.coef[0] == doctest::Approx(2.0));
  const auto kill = fit_lasso(x, y, 8.0, /*fit_intercept=*/false);
  CHECK(kill.coef[0] == 0.0);
}

TEST_CASE("elastic net with alpha=1 equals lasso") {
  SeededRng rng(26);
  const auto prob = random_problem(35, 6, rng);
  const auto lasso = fit_lasso(prob.x, prob.y, 0.7);
  const auto enet = fit_elastic_net(prob.x, prob.y, 0.7, 1.0);
  CHECK(std::abs(lasso.intercept - enet.intercept) <= 1e-8);
  CHECK(testutil::max_abs_diff(lasso.coef, enet.coef) <= 1e-8);
}

TEST_CASE("lasso and elastic net satisfy the KKT certificate") {
  SeededRng rng(27);
  for (int trial = 0; trial < 12; ++trial) {
    const auto prob = random_problem(20 + rng.uniform_int(80),
                                     2 + rng.uniform_int(10), rng, 0.7);
    const double lambda = 0.05 + rng.next_double() * 3.0;
    const auto lasso = fit_lasso(prob.x, prob.y, lambda);
    CHECK(kkt_violation(lasso, prob.x, prob.y) <= 1e-6);
    const double alpha = 0.2 + 0.6 * rng.next_double();
    const auto enet = fit_elastic_net(prob.x, prob.y, lambda, alpha);
    CHECK(kkt_violation(enet, prob.x, prob.y) <= 1e-6);
  }
}

TEST_CASE("lasso sparsity is monotone in lambda") {
  SeededRng rng(28);
  const auto prob = random_problem(60, 10, rng, 0.3);

  // lambda_max = 2 ||X^T y||_inf on centered data kills every coefficient.
  auto centered_y = prob.y;
  double mean_y = 0.0;
  for (double v : centered_y) mean_y += v;
  mean_y /= static_cast<double>(centered_y.size());
  for (double& v : centered_y) v -= mean_y;
  double lambda_max = 0.0;
  for (std::size_t j = 0; j < prob.x.cols(); ++j) {
    double col_mean = 0.0;
    for (std::size_t i = 0; i < prob.x.rows(); ++i) col_mean += prob.x(i, j);
    col_mean /= static_cast<double>(prob.x.rows());
    double g = 0.0;
    for (std::size_t i = 0; i < prob.x.rows(); ++i)
      g += (prob.x(i, j) - col_mean) * centered_y[i];
    lambda_max = std::max(lambda_max, 2.0 * std::abs(g));
  }

  std::size_t prev_nonzero = prob.x.cols() + 1;
  for (const double factor : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const auto model = fit_lasso(prob.x, prob.y, factor * lambda_max);
    std::size_t nonzero = 0;
    for (double w : model.coef)
      if (w != 0.0) ++nonzero;
    CHECK(nonzero <= prev_nonzero);
    prev_nonzero = nonzero;
    if (factor >= 1.0) CHECK(nonzero == 0);
  }
}

TEST_CASE("logistic loss values") {
  CHECK(logistic_loss(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(logistic_loss(-1.0, 0.0) == doctest::Approx(1.0));
  CHECK(logistic_loss(1.0, 50.0) <= 1e-20);
  CHECK(logistic_loss(1.0, -1.0) ==
        doctest::Approx(std::log1p(std::exp(1.0)) / std::log(2.0)));
  CHECK_THROWS_AS(logistic_loss(0.5, 1.0), Error);
}

TEST_CASE("logistic fit on symmetric data has zero intercept") {
  Matrix x(8, 1);
  Labels labels;
  labels.names = {"neg", "pos"};
  labels.values.assign(8, 0);
  for (int i = 0; i < 4; ++i) {
    x(i, 0) = -1.0 - 0.2 * i;
    x(4 + i, 0) = 1.0 + 0.2 * i;
    labels.values[4 + i] = 1;
  }
  const auto model = fit_logistic(x, labels, Penalty::l2, 0.1);
  CHECK(std::abs(model.intercept) <= 1e-6);
  CHECK(model.coef[0] > 0.0);
}

TEST_CASE("logistic gradient matches central finite differences") {
  SeededRng rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = random_matrix(20, 3, rng);
    Labels labels;
    labels.names = {"a", "b"};
    for (int i = 0; i < 20; ++i)
      labels.values.push_back(static_cast<int>(rng.uniform_int(2)));
    const auto y = labels.signed_values();

    const double w0 = rng.next_double() - 0.5;
    const auto w = random_vector(3, rng);
    double g0;
    std::vector<double> g;
    logistic_smooth_gradient(x, y, w0, w, Penalty::l2, 0.3, 0.5, g0, g);

    const double eps = 1e-6;
    auto objective_at = [&](double b0, std::vector<double> bw) {
      return logistic_objective(x, y, b0, bw, Penalty::l2, 0.3, 0.5);
    };
    const double fd0 =
        (objective_at(w0 + eps, w) - objective_at(w0 - eps, w)) / (2 * eps);
    CHECK(std::abs(fd0 - g0) <= 1e-5 * std::max(1.0, std::abs(fd0)));
    for (std::size_t j = 0; j < 3; ++j) {
      auto wp = w, wm = w;
      wp[j] += eps;
      wm[j] -= eps;
      const double fd = (objective_at(w0, wp) - objective_at(w0, wm)) / (2 * eps);
      CHECK(std::abs(fd - g[j]) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("logistic objective decreases along the solver path") {
  SeededRng rng(30);
  const Matrix x = random_matrix(30, 2, rng);
  Labels labels;
  labels.names = {"a", "b"};
  for (int i = 0; i < 30; ++i)
    labels.values.push_back(x(i, 0) + 0.3 * x(i, 1) > 0.1 ? 1 : 0);
  const auto model = fit_logistic(x, labels, Penalty::l2, 0.05);
  const auto y = labels.signed_values();
  const double at_zero = logistic_objective(
      x, y, 0.0, std::vector<double>(2, 0.0), Penalty::l2, 0.05, 0.5);
  const double at_fit = logistic_objective(x, y, model.intercept, model.coef,
                                           Penalty::l2, 0.05, 0.5);
  CHECK(at_fit < at_zero);
}

TEST_CASE("l1-penalized logistic produces sparse coefficients") {
  SeededRng rng(31);
  Matrix x = random_matrix(60, 4, rng);
  Labels labels;
  labels.names = {"a", "b"};
  // Only feature 0 matters.
  for (int i = 0; i < 60; ++i)
    labels.values.push_back(x(i, 0) > 0.0 ? 1 : 0);
  const auto model = fit_logistic(x, labels, Penalty::l1, 3.0);
  CHECK(model.coef[0] != 0.0);
  for (std::size_t j = 1; j < 4; ++j)
    CHECK(std::abs(model.coef[j]) <= 1e-8);
}

TEST_CASE("prediction and probability rules") {
  LogisticModel model;
  model.intercept = 0.0;
  model.coef = {1.0};
  model.classes.names = {"neg", "pos"};

  Matrix x(3, 1, {0.0, 1e6, -1e6});
  const auto classes = predict(model, x);
  CHECK(classes == std::vector<int>{0, 1, 0});  // f = 0 goes negative

  const Matrix proba = predict_proba(model, x);
  CHECK(proba(0, 1) == doctest::Approx(0.5));
  CHECK(proba(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(proba(2, 1) == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(proba(i, 0) + proba(i, 1) == 1.0);  // exact complement
    CHECK(proba(i, 0) >= 0.0);
    CHECK(proba(i, 1) <= 1.0);
  }

  // Zero-weight model predicts probability one half everywhere.
  LogisticModel zero;
  zero.coef = {0.0};
  zero.classes.names = {"neg", "pos"};
  const Matrix anywhere(2, 1, {3.0, -8.0});
  const Matrix p = predict_proba(zero, anywhere);
  CHECK(p(0, 1) == doctest::Approx(0.5));
  CHECK(p(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("degenerate label sets are rejected") {
  Matrix x(3, 1, {0.0, 1.0, 2.0});
  Labels one_class;
  one_class.values = {0, 0, 0};
  one_class.names = {"only"};
  CHECK_THROWS_AS(fit_logistic(x, one_class, Penalty::none, 0.0), Error);
}
