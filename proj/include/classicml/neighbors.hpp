#pragma once

#include <optional>
#include <string>
#include <vector>

#include "classicml/core.hpp"

namespace classicml {
namespace neighbors {

enum class IndexKind { brute, kdtree, balltree };
enum class WeightScheme { uniform, inverse };

// Neighbors of a query point, sorted by ascending distance with ties broken
// by ascending training index.
struct NeighborQueryResult {
  std::vector<int> indices;
  std::vector<double> distances;
};

// Exact nearest-neighbor index over a fixed point set. All three kinds
// return identical results; the trees only prune work. Built indexes are
// immutable and safe for concurrent queries.
class NeighborIndex {
 public:
  static NeighborIndex build(Matrix x, IndexKind kind, int leaf_size = 30);

  NeighborQueryResult query_knn(std::span<const double> x, int k) const;
  NeighborQueryResult query_radius(std::span<const double> x, double r) const;

  const Matrix& points() const { return points_; }
  IndexKind kind() const { return kind_; }
  int leaf_size() const { return leaf_size_; }

  // Node audit hooks for tests.
  struct Node {
    int left = -1;
    int right = -1;
    // Leaf payload: [start, end) into the permutation array.
    int start = 0;
    int end = 0;
    // k-d internals.
    int split_dim = -1;
    double threshold = 0.0;
    std::vector<double> bbox_lo, bbox_hi;
    // Ball internals.
    std::vector<double> center;
    double radius = 0.0;

    bool is_leaf() const { return left < 0; }
  };
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& permutation() const { return perm_; }

 private:
  Matrix points_;
  IndexKind kind_ = IndexKind::brute;
  int leaf_size_ = 30;
  std::vector<Node> nodes_;
  std::vector<int> perm_;

  int build_node(int start, int end);
};

// Normalized neighbor weights. Uniform gives 1/|N| each; inverse gives
// w_i proportional to 1/d_i, except that zero-distance neighbors (where the
// formula would divide by zero) share all the weight equally.
std::vector<double> neighbor_weights(std::span<const double> distances,
                                     WeightScheme scheme);

double knn_predict_regression(const NeighborIndex& index,
                              const Targets& targets,
                              std::span<const double> x, int k,
                              WeightScheme scheme);

std::pair<int, std::vector<double>> knn_predict_classification(
    const NeighborIndex& index, const Labels& labels,
    std::span<const double> x, int k, WeightScheme scheme);

// Radius variants; an empty neighborhood is an error the caller must handle.
double radius_predict_regression(const NeighborIndex& index,
                                 const Targets& targets,
                                 std::span<const double> x, double r,
                                 WeightScheme scheme);

std::pair<int, std::vector<double>> radius_predict_classification(
    const NeighborIndex& index, const Labels& labels,
    std::span<const double> x, double r, WeightScheme scheme);

std::string kind_name(IndexKind kind);
IndexKind kind_from_name(const std::string& name);
std::string scheme_name(WeightScheme scheme);
WeightScheme scheme_from_name(const std::string& name);

}  // namespace neighbors
}  // namespace classicml
