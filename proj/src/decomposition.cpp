#include "classicml/decomposition.hpp"

#include <cmath>

#include "classicml/linalg.hpp"

namespace classicml {
namespace decomposition {

PcaModel pca_fit(const Matrix& x, int l) {
  check_finite(x, "X");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 2) {
    throw Error(ErrorCode::degenerate_input, "PCA needs at least two rows");
  }
  if (l < 1 || static_cast<std::size_t>(l) > p) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "component count out of range");
  }

  auto [centered, means] = linalg::center_columns(x);
  Matrix scatter(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += centered(i, a) * centered(i, b);
      scatter(a, b) = s;
      scatter(b, a) = s;
    }
  }
  const auto eig = linalg::sym_eig(scatter);

  PcaModel model;
  model.means = std::move(means);
  model.total_variance = 0.0;
  for (double v : eig.values) model.total_variance += v;
  model.components = Matrix(p, l);
  for (int c = 0; c < l; ++c) {
    model.explained_variance.push_back(eig.values[c]);
    model.explained_variance_ratio.push_back(eig.values[c] /
                                             model.total_variance);
    for (std::size_t j = 0; j < p; ++j)
      model.components(j, c) = eig.vectors(j, c);
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.means.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  const std::size_t l = model.components.cols();
  Matrix t(x.rows(), l);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t c = 0; c < l; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j)
        s += (x(i, j) - model.means[j]) * model.components(j, c);
      t(i, c) = s;
    }
  }
  return t;
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& t) {
  if (t.cols() != model.components.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from component count");
  }
  const std::size_t p = model.means.size();
  Matrix x(t.rows(), p);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = model.means[j];
      for (std::size_t c = 0; c < t.cols(); ++c)
        s += t(i, c) * model.components(j, c);
      x(i, j) = s;
    }
  }
  return x;
}

std::pair<LdaProjection, Matrix> lda_fit_transform(const Matrix& x,
                                                   const Labels& labels,
                                                   int l) {
  check_finite(x, "X");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const int q = labels.num_classes();
  if (n != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  if (q < 2) {
    throw Error(ErrorCode::degenerate_labels,
                "LDA projection needs at least two classes");
  }
  if (l < 1 || l > q - 1) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "LDA component count must lie in [1, q-1]");
  }

  const auto counts = labels.class_counts();
  Matrix class_means(q, p);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = labels.values[i];
    for (std::size_t j = 0; j < p; ++j) class_means(k, j) += x(i, j);
  }
  std::vector<double> overall(p, 0.0);
  for (int k = 0; k < q; ++k) {
    for (std::size_t j = 0; j < p; ++j) {
      overall[j] += class_means(k, j) / static_cast<double>(n);
      class_means(k, j) /= static_cast<double>(counts[k]);
    }
  }

  // Within-class scatter: plain sum of outer products. Between-class scatter
  // weights each class by its sample proportion n_k.
  Matrix sw(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = labels.values[i];
    for (std::size_t a = 0; a < p; ++a) {
      const double da = x(i, a) - class_means(k, a);
      for (std::size_t b = a; b < p; ++b)
        sw(a, b) += da * (x(i, b) - class_means(k, b));
    }
  }
  Matrix sb(p, p);
  for (int k = 0; k < q; ++k) {
    const double prop =
        static_cast<double>(counts[k]) / static_cast<double>(n);
    for (std::size_t a = 0; a < p; ++a) {
      const double da = class_means(k, a) - overall[a];
      for (std::size_t b = a; b < p; ++b)
        sb(a, b) += prop * da * (class_means(k, b) - overall[b]);
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) {
      sw(b, a) = sw(a, b);
      sb(b, a) = sb(a, b);
    }

  double trace = 0.0;
  for (std::size_t a = 0; a < p; ++a) trace += sw(a, a);
  for (std::size_t a = 0; a < p; ++a)
    sw(a, a) += 1e-9 * trace / static_cast<double>(p);

  // Symmetric reduction of the generalized problem: with S_w = L L^T,
  // eigendecompose L^{-1} S_b L^{-T} and map the eigenvectors back through
  // L^{-T}.
  const linalg::Cholesky chol(sw);
  const Matrix half = chol.solve_lower(sb);
  const Matrix reduced = chol.solve_lower(half.transposed());
  Matrix sym(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b)
      sym(a, b) = 0.5 * (reduced(a, b) + reduced(b, a));
  const auto eig = linalg::sym_eig(sym);

  // Back-substitute L^T W = V column by column.
  const Matrix& lower = chol.factor();
  LdaProjection proj;
  proj.projection = Matrix(p, l);
  for (int c = 0; c < l; ++c) {
    proj.eigenvalues.push_back(eig.values[c]);
    std::vector<double> w(p);
    for (std::size_t ii = p; ii-- > 0;) {
      double s = eig.vectors(ii, c);
      for (std::size_t kk = ii + 1; kk < p; ++kk)
        s -= lower(kk, ii) * w[kk];
      w[ii] = s / lower(ii, ii);
    }
    // Deterministic orientation: largest-magnitude entry positive.
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (std::abs(w[j]) > best) {
        best = std::abs(w[j]);
        arg = j;
      }
    }
    const double sign = w[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < p; ++j)
      proj.projection(j, c) = sign * w[j];
  }
  Matrix transformed = lda_project(proj, x);
  return {std::move(proj), std::move(transformed)};
}

Matrix lda_project(const LdaProjection& model, const Matrix& x) {
  if (x.cols() != model.projection.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  return linalg::matmul(x, model.projection);
}

}  // namespace decomposition
}  // namespace classicml
