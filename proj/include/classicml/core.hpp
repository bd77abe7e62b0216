#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace classicml {

// Error taxonomy shared by every module. Each code belongs to one of three
// families that the CLI maps to fixed exit codes: configuration (2),
// data (3), numeric (4).
enum class ErrorCode {
  config,
  invalid_hyperparameter,
  dimension_mismatch,
  not_symmetric,
  empty_dataset,
  degenerate_labels,
  degenerate_input,
  empty_neighborhood,
  empty_partition,
  parse,
  singular_matrix,
  convergence_failure,
  degenerate_component,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  int exit_code() const {
    switch (code_) {
      case ErrorCode::config:
      case ErrorCode::invalid_hyperparameter:
        return 2;
      case ErrorCode::singular_matrix:
      case ErrorCode::convergence_failure:
      case ErrorCode::degenerate_component:
        return 4;
      default:
        return 3;
    }
  }

 private:
  ErrorCode code_;
};

// Convergence failures carry the last iterate so callers can inspect or
// salvage it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, std::vector<double> last)
      : Error(ErrorCode::convergence_failure, message),
        last_iterate(std::move(last)) {}

  std::vector<double> last_iterate;
};

// Dense row-major n x p matrix of finite doubles; the universal sample
// container.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const;

  bool all_finite() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Class labels as indices 0..q-1 plus the dictionary back to the original
// strings. For binary problems index 0 is the negative class and index 1 the
// positive class.
struct Labels {
  std::vector<int> values;
  std::vector<std::string> names;

  std::size_t size() const { return values.size(); }
  int num_classes() const { return static_cast<int>(names.size()); }

  std::string decode(int index) const { return names.at(index); }
  std::vector<std::string> decode_all() const;

  // +1 / -1 view for binary problems (index 1 maps to +1).
  std::vector<double> signed_values() const;

  std::vector<std::size_t> class_counts() const;
};

// Real-valued regression targets.
struct Targets {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

Labels encode_labels(const std::vector<std::string>& raw);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

double squared_distance(std::span<const double> a, std::span<const double> b);

// Throws when any entry of X is NaN or infinite; fit entry points call this.
void check_finite(const Matrix& x, const char* what);
void check_finite(std::span<const double> v, const char* what);

}  // namespace classicml
