#include "classicml/core.hpp"

#include <cmath>
#include <unordered_map>

namespace classicml {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::dimension_mismatch,
                "matrix data size does not match rows*cols");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw Error(ErrorCode::dimension_mismatch, "ragged row list");
    }
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<std::string> Labels::decode_all() const {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (int v : values) out.push_back(names.at(v));
  return out;
}

std::vector<double> Labels::signed_values() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = values[i] == 1 ? 1.0 : -1.0;
  return out;
}

std::vector<std::size_t> Labels::class_counts() const {
  std::vector<std::size_t> counts(names.size(), 0);
  for (int v : values) ++counts[v];
  return counts;
}

Labels encode_labels(const std::vector<std::string>& raw) {
  if (raw.empty()) {
    throw Error(ErrorCode::empty_dataset, "cannot encode an empty label list");
  }
  Labels labels;
  labels.values.reserve(raw.size());
  std::unordered_map<std::string, int> index;
  for (const auto& s : raw) {
    auto [it, inserted] = index.try_emplace(s, static_cast<int>(labels.names.size()));
    if (inserted) labels.names.push_back(s);
    labels.values.push_back(it->second);
  }
  return labels;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "vectors have different lengths");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

void check_finite(const Matrix& x, const char* what) {
  if (!x.all_finite()) {
    throw Error(ErrorCode::degenerate_input,
                std::string(what) + " contains a non-finite value");
  }
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::degenerate_input,
                  std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace classicml
