#pragma once

#include "classicml/core.hpp"

namespace classicml {

// Squared Euclidean distances between the rows of a (n x p) and b (m x p),
// returned as an n x m matrix. The serial and OpenMP paths compute each
// entry independently with the same arithmetic, so their outputs are
// bit-identical; the unqualified entry point dispatches on thread_count().
Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);
Matrix pairwise_sq_dists_serial(const Matrix& a, const Matrix& b);
Matrix pairwise_sq_dists_omp(const Matrix& a, const Matrix& b, int threads);

}  // namespace classicml
