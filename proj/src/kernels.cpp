#include "classicml/kernels.hpp"

#include <cmath>

#include "classicml/linalg.hpp"
#include "classicml/parallel.hpp"

namespace classicml {
namespace kernels {

void validate(const KernelSpec& spec) {
  if (spec.kind == KernelKind::linear) return;
  if (!(spec.gamma > 0.0)) {
    throw Error(ErrorCode::invalid_hyperparameter, "kernel gamma must be > 0");
  }
  if (spec.kind == KernelKind::rbf) return;
  if (spec.c0 < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "kernel c0 must be >= 0");
  }
  if (spec.kind == KernelKind::polynomial && spec.degree < 1) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "polynomial degree must be a positive integer");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel operand size mismatch");
  }
  switch (spec.kind) {
    case KernelKind::linear:
      return linalg::dot(x, y);
    case KernelKind::polynomial: {
      const double base = spec.gamma * linalg::dot(x, y) + spec.c0;
      double r = 1.0;
      for (int d = 0; d < spec.degree; ++d) r *= base;
      return r;
    }
    case KernelKind::sigmoid:
      return std::tanh(spec.gamma * linalg::dot(x, y) + spec.c0);
    case KernelKind::rbf:
      return std::exp(-spec.gamma * squared_distance(x, y));
  }
  return 0.0;
}

namespace {

void gram_row(const KernelSpec& spec, const Matrix& a, const Matrix& b,
              std::size_t i, Matrix& out) {
  const auto ai = a.row(i);
  for (std::size_t j = 0; j < b.rows(); ++j) {
    out(i, j) = kernel_eval(spec, ai, b.row(j));
  }
}

}  // namespace

Matrix gram_serial(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  validate(spec);
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "gram operand size mismatch");
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) gram_row(spec, a, b, i, out);
  return out;
}

Matrix gram_omp(const KernelSpec& spec, const Matrix& a, const Matrix& b,
                int threads) {
  validate(spec);
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "gram operand size mismatch");
  }
  Matrix out(a.rows(), b.rows());
  parallel_for_threads(threads, a.rows(),
                       [&](std::size_t i) { gram_row(spec, a, b, i, out); });
  return out;
}

Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  return gram_omp(spec, a, b, thread_count());
}

KernelRidgeModel fit_kernel_ridge(const Matrix& x, std::span<const double> y,
                                  const KernelSpec& spec, double lambda) {
  validate(spec);
  check_finite(x, "X");
  check_finite(y, "y");
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and y row counts differ");
  }
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "kernel ridge lambda must be > 0");
  }
  Matrix k = gram(spec, x, x);
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += lambda;
  KernelRidgeModel model;
  model.alpha = linalg::solve_spd(k, y);
  model.train_x = x;
  model.lambda = lambda;
  model.kernel = spec;
  return model;
}

std::vector<double> krr_predict(const KernelRidgeModel& model,
                                const Matrix& x) {
  const Matrix cross = gram(model.kernel, x, model.train_x);
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out[i] = linalg::dot(cross.row(i), model.alpha);
  }
  return out;
}

KernelPcaModel kernel_pca_fit(const Matrix& x, const KernelSpec& spec, int l) {
  validate(spec);
  check_finite(x, "X");
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorCode::empty_dataset, "kernel PCA of no rows");
  if (l < 1 || static_cast<std::size_t>(l) > n) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "component count out of range");
  }

  const Matrix k = gram(spec, x, x);
  std::vector<double> col_means(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) col_means[j] += k(i, j);
  }
  for (std::size_t j = 0; j < n; ++j) {
    total += col_means[j];
    col_means[j] /= static_cast<double>(n);
  }
  total /= static_cast<double>(n * n);

  // K~ = K - 1K - K1 + 1K1 with 1 the all-(1/n) matrix; K is symmetric so
  // row means equal column means.
  Matrix centered(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      centered(i, j) = k(i, j) - col_means[i] - col_means[j] + total;
    }
  }

  auto eig = linalg::sym_eig(centered);

  int usable = 0;
  while (usable < l && eig.values[usable] > 1e-10) ++usable;

  KernelPcaModel model;
  model.train_x = x;
  model.kernel = spec;
  model.requested_components = l;
  model.reduced = usable < l;
  model.eigenvalues.assign(eig.values.begin(), eig.values.begin() + usable);
  model.alphas = Matrix(n, usable);
  for (int c = 0; c < usable; ++c) {
    const double scale = 1.0 / std::sqrt(eig.values[c]);
    for (std::size_t i = 0; i < n; ++i) {
      model.alphas(i, c) = eig.vectors(i, c) * scale;
    }
  }
  model.train_col_means = std::move(col_means);
  model.train_mean = total;
  return model;
}

Matrix kernel_pca_transform(const KernelPcaModel& model, const Matrix& z) {
  if (z.cols() != model.train_x.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from training data");
  }
  const std::size_t n = model.train_x.rows();
  const int l = model.components();
  const Matrix cross = gram(model.kernel, z, model.train_x);
  Matrix out(z.rows(), l);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double row_mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_mean += cross(i, j);
    row_mean /= static_cast<double>(n);
    for (int c = 0; c < l; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double centered = cross(i, j) - row_mean -
                                model.train_col_means[j] + model.train_mean;
        s += centered * model.alphas(j, c);
      }
      out(i, c) = s;
    }
  }
  return out;
}

std::string kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::sigmoid: return "sigmoid";
    case KernelKind::rbf: return "rbf";
  }
  return "unknown";
}

KernelKind kind_from_name(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "polynomial") return KernelKind::polynomial;
  if (name == "sigmoid") return KernelKind::sigmoid;
  if (name == "rbf") return KernelKind::rbf;
  throw Error(ErrorCode::config, "unknown kernel: " + name);
}

}  // namespace kernels
}  // namespace classicml
