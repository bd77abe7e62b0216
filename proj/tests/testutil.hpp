#pragma once

#include <cmath>
#include <vector>

#include "classicml/core.hpp"
#include "classicml/rng.hpp"

namespace testutil {

using classicml::Labels;
using classicml::Matrix;
using classicml::SeededRng;

inline Matrix random_matrix(std::size_t n, std::size_t p, SeededRng& rng,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(n, p);
  for (double& v : m.data()) v = lo + rng.next_double() * (hi - lo);
  return m;
}

inline std::vector<double> random_vector(std::size_t n, SeededRng& rng,
                                         double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + rng.next_double() * (hi - lo);
  return v;
}

// Random symmetric positive definite matrix M^T M + I.
inline Matrix random_spd(std::size_t p, SeededRng& rng) {
  const Matrix m = random_matrix(p, p, rng);
  Matrix a(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < p; ++k) s += m(k, i) * m(k, j);
      a(i, j) = s;
    }
  return a;
}

// Three well-separated Gaussian blobs (means 10 apart, unit variance).
struct Blobs {
  Matrix x;
  Labels labels;
};

inline Blobs gaussian_blobs(int per_class, SeededRng& rng) {
  const double means[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
  Matrix x(3 * per_class, 2);
  Labels labels;
  labels.names = {"a", "b", "c"};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_class; ++i) {
      const std::size_t row = c * per_class + i;
      x(row, 0) = means[c][0] + rng.normal();
      x(row, 1) = means[c][1] + rng.normal();
      labels.values.push_back(c);
    }
  }
  return {std::move(x), std::move(labels)};
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
