#pragma once

#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace decomposition {

// Principal components of the centered data. Explained variances are the raw
// eigenvalues of Xc^T Xc (descending); ratios divide by the total over all p
// eigenvalues and are therefore divisor-free.
struct PcaModel {
  std::vector<double> means;               // p
  Matrix components;                       // p x l, orthonormal columns
  std::vector<double> explained_variance;  // l
  std::vector<double> explained_variance_ratio;  // l
  double total_variance = 0.0;             // sum of all p eigenvalues
};

PcaModel pca_fit(const Matrix& x, int l);
Matrix pca_transform(const PcaModel& model, const Matrix& x);
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& t);

// Supervised projection maximizing between-class over within-class scatter;
// at most q-1 useful directions.
struct LdaProjection {
  Matrix projection;               // p x l
  std::vector<double> eigenvalues;  // l, descending
};

std::pair<LdaProjection, Matrix> lda_fit_transform(const Matrix& x,
                                                   const Labels& labels,
                                                   int l);
Matrix lda_project(const LdaProjection& model, const Matrix& x);

}  // namespace decomposition
}  // namespace classicml
