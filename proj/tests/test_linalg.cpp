#include <doctest.h>

#include <cmath>

#include "classicml/linalg.hpp"
#include "testutil.hpp"

using namespace classicml;
using namespace classicml::linalg;
using testutil::random_matrix;
using testutil::random_spd;
using testutil::random_vector;

TEST_CASE("solve_spd trivial systems") {
  const Matrix eye = Matrix::identity(3);
  const std::vector<double> b{1.0, -2.0, 0.5};
  CHECK(solve_spd(eye, b) == b);

  Matrix diag(2, 2, {2.0, 0.0, 0.0, 2.0});
  const auto x = solve_spd(diag, std::vector<double>{4.0, 6.0});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("solve_spd residuals on random problems") {
  SeededRng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 2 + rng.uniform_int(10);
    const Matrix a = random_spd(p, rng);
    const auto b = random_vector(p, rng);
    const auto x = solve_spd(a, b);
    const auto ax = matvec(a, x);
    double xmax = 0.0, bmax = 0.0, err = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      xmax = std::max(xmax, std::abs(x[i]));
      bmax = std::max(bmax, std::abs(b[i]));
      err = std::max(err, std::abs(ax[i] - b[i]));
    }
    CHECK(err <= 1e-8 * (max_abs(a) * xmax + bmax));
  }
}

TEST_CASE("solve_spd recovers x for well-conditioned systems") {
  SeededRng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t p = 3 + rng.uniform_int(8);
    const Matrix a = random_spd(p, rng);
    const auto x_true = random_vector(p, rng);
    const auto b = matvec(a, x_true);
    const auto x = solve_spd(a, b);
    for (std::size_t i = 0; i < p; ++i)
      CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-8));
  }
}

TEST_CASE("cholesky rejects indefinite matrices") {
  Matrix bad(2, 2, {1.0, 2.0, 2.0, 1.0});  // eigenvalues 3, -1
  CHECK_THROWS_AS(Cholesky{bad}, Error);
  Matrix asym(2, 2, {1.0, 0.5, -0.5, 1.0});
  CHECK_THROWS_AS(Cholesky{asym}, Error);
}

TEST_CASE("sym_eig on fixed small matrices") {
  const auto eye = sym_eig(Matrix::identity(2));
  CHECK(eye.values[0] == doctest::Approx(1.0));
  CHECK(eye.values[1] == doctest::Approx(1.0));

  Matrix diag(2, 2, {3.0, 0.0, 0.0, 1.0});
  const auto d = sym_eig(diag);
  CHECK(d.values[0] == doctest::Approx(3.0));
  CHECK(d.values[1] == doctest::Approx(1.0));
  CHECK(d.vectors(0, 0) == doctest::Approx(1.0));
  CHECK(d.vectors(1, 1) == doctest::Approx(1.0));

  Matrix m(2, 2, {2.0, 1.0, 1.0, 2.0});
  const auto e = sym_eig(m);
  CHECK(e.values[0] == doctest::Approx(3.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(inv_sqrt2));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("sym_eig reconstruction and orthogonality on random matrices") {
  SeededRng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t p = 2 + rng.uniform_int(30);
    Matrix a(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) {
        a(i, j) = rng.next_double() * 2.0 - 1.0;
        a(j, i) = a(i, j);
      }
    const auto eig = sym_eig(a);

    // Columns orthonormal.
    for (std::size_t c1 = 0; c1 < p; ++c1) {
      for (std::size_t c2 = c1; c2 < p; ++c2) {
        double s = 0.0;
        for (std::size_t r = 0; r < p; ++r)
          s += eig.vectors(r, c1) * eig.vectors(r, c2);
        CHECK(s == doctest::Approx(c1 == c2 ? 1.0 : 0.0).epsilon(1e-8));
      }
    }

    // A v = lambda v componentwise.
    const double scale = max_abs(a);
    for (std::size_t c = 0; c < p; ++c) {
      std::vector<double> v(p);
      for (std::size_t r = 0; r < p; ++r) v[r] = eig.vectors(r, c);
      const auto av = matvec(a, v);
      for (std::size_t r = 0; r < p; ++r) {
        CHECK(std::abs(av[r] - eig.values[c] * v[r]) <= 1e-8 * scale);
      }
    }

    // V diag(lambda) V^T reconstructs A.
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < p; ++c)
          s += eig.vectors(i, c) * eig.values[c] * eig.vectors(j, c);
        CHECK(std::abs(s - a(i, j)) <= 1e-7 * std::max(scale, 1.0));
      }

    // Sign convention: largest-magnitude entry positive.
    for (std::size_t c = 0; c < p; ++c) {
      double best = 0.0;
      for (std::size_t r = 0; r < p; ++r)
        if (std::abs(eig.vectors(r, c)) > std::abs(best))
          best = eig.vectors(r, c);
      CHECK(best > 0.0);
    }
  }
}

TEST_CASE("center_columns zeroes the means") {
  Matrix m(2, 1, {1.0, 3.0});
  auto [centered, means] = center_columns(m);
  CHECK(means[0] == doctest::Approx(2.0));
  CHECK(centered(0, 0) == doctest::Approx(-1.0));
  CHECK(centered(1, 0) == doctest::Approx(1.0));

  SeededRng rng(5);
  const Matrix r = random_matrix(40, 6, rng);
  auto [rc, rmeans] = center_columns(r);
  for (std::size_t j = 0; j < r.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i) s += rc(i, j);
    CHECK(std::abs(s / static_cast<double>(r.rows())) <= 1e-12);
  }

  // Idempotence on already-centered data.
  auto [rc2, zero_means] = center_columns(rc);
  for (std::size_t j = 0; j < r.cols(); ++j)
    CHECK(std::abs(zero_means[j]) <= 1e-15);
}

TEST_CASE("covariance matches the direct double-loop formula") {
  Matrix two(2, 1, {0.0, 2.0});
  const Matrix v = covariance(two, CovDivisor::n);
  CHECK(v(0, 0) == doctest::Approx(1.0));

  Matrix constant(3, 2, {1.0, 5.0, 1.0, 6.0, 1.0, 7.0});
  const Matrix c = covariance(constant, CovDivisor::n);
  CHECK(c(0, 0) == doctest::Approx(0.0));
  CHECK(c(0, 1) == doctest::Approx(0.0));

  SeededRng rng(6);
  const Matrix x = random_matrix(25, 4, rng);
  for (const auto divisor : {CovDivisor::n, CovDivisor::n_minus_1}) {
    const Matrix cov = covariance(x, divisor);
    const double div = divisor == CovDivisor::n ? 25.0 : 24.0;
    std::vector<double> means(4, 0.0);
    for (std::size_t i = 0; i < 25; ++i)
      for (std::size_t j = 0; j < 4; ++j) means[j] += x(i, j) / 25.0;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < 25; ++i)
          s += (x(i, a) - means[a]) * (x(i, b) - means[b]);
        CHECK(cov(a, b) == doctest::Approx(s / div).epsilon(1e-10));
      }
  }

  Matrix one(1, 1, {3.0});
  CHECK_THROWS_AS(covariance(one, CovDivisor::n_minus_1), Error);
  CHECK_NOTHROW(covariance(one, CovDivisor::n));
}
