#include "classicml/pairwise.hpp"

#include "classicml/parallel.hpp"

namespace classicml {

namespace {

void check_shapes(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "row dimensions differ between matrices");
  }
}

inline void fill_row(const Matrix& a, const Matrix& b, std::size_t i,
                     Matrix& out) {
  const auto ai = a.row(i);
  for (std::size_t j = 0; j < b.rows(); ++j) {
    out(i, j) = squared_distance(ai, b.row(j));
  }
}

}  // namespace

Matrix pairwise_sq_dists_serial(const Matrix& a, const Matrix& b) {
  check_shapes(a, b);
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) fill_row(a, b, i, out);
  return out;
}

Matrix pairwise_sq_dists_omp(const Matrix& a, const Matrix& b, int threads) {
  check_shapes(a, b);
  Matrix out(a.rows(), b.rows());
  parallel_for_threads(threads, a.rows(),
                       [&](std::size_t i) { fill_row(a, b, i, out); });
  return out;
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  return pairwise_sq_dists_omp(a, b, thread_count());
}

}  // namespace classicml
