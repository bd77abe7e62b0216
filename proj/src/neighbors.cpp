#include "classicml/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace classicml {
namespace neighbors {

namespace {

struct Candidate {
  double dist;
  int index;

  bool operator<(const Candidate& o) const {
    return dist < o.dist || (dist == o.dist && index < o.index);
  }
};

// Bounded worst-on-top heap over (distance, index).
class KBest {
 public:
  explicit KBest(std::size_t k) : k_(k) {}

  void offer(double dist, int index) {
    const Candidate c{dist, index};
    if (heap_.size() < k_) {
      heap_.push(c);
    } else if (c < heap_.top()) {
      heap_.pop();
      heap_.push(c);
    }
  }

  bool full() const { return heap_.size() == k_; }
  double worst() const { return heap_.top().dist; }

  // True when a subtree whose best possible distance is `bound` cannot
  // contribute. Equal bounds must still be explored: a tied point with a
  // lower index can displace the current worst.
  bool can_prune(double bound) const {
    return full() && bound > heap_.top().dist;
  }

  NeighborQueryResult finish() {
    std::vector<Candidate> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::sort(out.begin(), out.end());
    NeighborQueryResult r;
    for (const auto& c : out) {
      r.indices.push_back(c.index);
      r.distances.push_back(c.dist);
    }
    return r;
  }

 private:
  std::size_t k_;
  std::priority_queue<Candidate> heap_;
};

}  // namespace

int NeighborIndex::build_node(int start, int end) {
  const int p = static_cast<int>(points_.cols());
  Node node;
  node.start = start;
  node.end = end;

  node.bbox_lo.assign(p, std::numeric_limits<double>::infinity());
  node.bbox_hi.assign(p, -std::numeric_limits<double>::infinity());
  for (int i = start; i < end; ++i) {
    const auto row = points_.row(perm_[i]);
    for (int j = 0; j < p; ++j) {
      node.bbox_lo[j] = std::min(node.bbox_lo[j], row[j]);
      node.bbox_hi[j] = std::max(node.bbox_hi[j], row[j]);
    }
  }

  if (kind_ == IndexKind::balltree) {
    node.center.assign(p, 0.0);
    for (int i = start; i < end; ++i) {
      const auto row = points_.row(perm_[i]);
      for (int j = 0; j < p; ++j) node.center[j] += row[j];
    }
    for (int j = 0; j < p; ++j) node.center[j] /= (end - start);
    node.radius = 0.0;
    for (int i = start; i < end; ++i) {
      node.radius = std::max(
          node.radius, euclidean_distance(node.center, points_.row(perm_[i])));
    }
  }

  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - start <= leaf_size_) return id;

  // Split on the dimension of largest spread at its lower median.
  int dim = 0;
  double best_spread = -1.0;
  for (int j = 0; j < p; ++j) {
    const double spread = node.bbox_hi[j] - node.bbox_lo[j];
    if (spread > best_spread) {
      best_spread = spread;
      dim = j;
    }
  }
  if (best_spread <= 0.0) return id;  // all points identical

  std::vector<double> values;
  values.reserve(end - start);
  for (int i = start; i < end; ++i) values.push_back(points_(perm_[i], dim));
  std::sort(values.begin(), values.end());
  const double threshold = values[(values.size() - 1) / 2];

  auto mid_it = std::stable_partition(
      perm_.begin() + start, perm_.begin() + end,
      [&](int idx) { return points_(idx, dim) <= threshold; });
  const int mid = static_cast<int>(mid_it - perm_.begin());
  if (mid == start || mid == end) return id;  // no usable split

  const int left = build_node(start, mid);
  const int right = build_node(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].split_dim = dim;
  nodes_[id].threshold = threshold;
  return id;
}

NeighborIndex NeighborIndex::build(Matrix x, IndexKind kind, int leaf_size) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::empty_dataset, "cannot index an empty matrix");
  }
  if (leaf_size < 1) {
    throw Error(ErrorCode::invalid_hyperparameter, "leaf_size must be >= 1");
  }
  check_finite(x, "X");
  NeighborIndex index;
  index.points_ = std::move(x);
  index.kind_ = kind;
  index.leaf_size_ = leaf_size;
  if (kind != IndexKind::brute) {
    index.perm_.resize(index.points_.rows());
    std::iota(index.perm_.begin(), index.perm_.end(), 0);
    index.build_node(0, static_cast<int>(index.points_.rows()));
  }
  return index;
}

namespace {

double bbox_min_dist(std::span<const double> x,
                     const NeighborIndex::Node& node) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double d = 0.0;
    if (x[j] < node.bbox_lo[j]) {
      d = node.bbox_lo[j] - x[j];
    } else if (x[j] > node.bbox_hi[j]) {
      d = x[j] - node.bbox_hi[j];
    }
    s += d * d;
  }
  return std::sqrt(s);
}

double ball_min_dist(std::span<const double> x,
                     const NeighborIndex::Node& node) {
  return std::max(0.0, euclidean_distance(x, node.center) - node.radius);
}

}  // namespace

NeighborQueryResult NeighborIndex::query_knn(std::span<const double> x,
                                             int k) const {
  if (x.size() != points_.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "query width differs from indexed points");
  }
  if (k < 1 || static_cast<std::size_t>(k) > points_.rows()) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "k must lie in [1, n]");
  }
  KBest best(static_cast<std::size_t>(k));

  if (kind_ == IndexKind::brute) {
    for (std::size_t i = 0; i < points_.rows(); ++i) {
      best.offer(euclidean_distance(x, points_.row(i)), static_cast<int>(i));
    }
    return best.finish();
  }

  auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.is_leaf()) {
      for (int i = node.start; i < node.end; ++i) {
        const int idx = perm_[i];
        best.offer(euclidean_distance(x, points_.row(idx)), idx);
      }
      return;
    }
    int first = node.left;
    int second = node.right;
    if (kind_ == IndexKind::kdtree) {
      if (x[node.split_dim] > node.threshold) std::swap(first, second);
    } else {
      if (ball_min_dist(x, nodes_[second]) < ball_min_dist(x, nodes_[first]))
        std::swap(first, second);
    }
    for (int child : {first, second}) {
      const double bound = kind_ == IndexKind::kdtree
                               ? bbox_min_dist(x, nodes_[child])
                               : ball_min_dist(x, nodes_[child]);
      if (!best.can_prune(bound)) self(self, child);
    }
  };
  visit(visit, 0);
  return best.finish();
}

NeighborQueryResult NeighborIndex::query_radius(std::span<const double> x,
                                                double r) const {
  if (x.size() != points_.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "query width differs from indexed points");
  }
  if (!(r > 0.0)) {
    throw Error(ErrorCode::invalid_hyperparameter, "radius must be > 0");
  }
  std::vector<Candidate> hits;

  auto consider = [&](int idx) {
    const double d = euclidean_distance(x, points_.row(idx));
    if (d < r) hits.push_back({d, idx});  // strict, d(x, x_i) < r
  };

  if (kind_ == IndexKind::brute) {
    for (std::size_t i = 0; i < points_.rows(); ++i)
      consider(static_cast<int>(i));
  } else {
    auto visit = [&](auto&& self, int id) -> void {
      const Node& node = nodes_[id];
      const double bound = kind_ == IndexKind::kdtree ? bbox_min_dist(x, node)
                                                      : ball_min_dist(x, node);
      if (bound >= r) return;
      if (node.is_leaf()) {
        for (int i = node.start; i < node.end; ++i) consider(perm_[i]);
        return;
      }
      self(self, node.left);
      self(self, node.right);
    };
    visit(visit, 0);
  }

  std::sort(hits.begin(), hits.end());
  NeighborQueryResult result;
  for (const auto& c : hits) {
    result.indices.push_back(c.index);
    result.distances.push_back(c.dist);
  }
  return result;
}

std::vector<double> neighbor_weights(std::span<const double> distances,
                                     WeightScheme scheme) {
  if (distances.empty()) {
    throw Error(ErrorCode::empty_neighborhood, "neighborhood is empty");
  }
  const std::size_t m = distances.size();
  std::vector<double> weights(m, 0.0);
  if (scheme == WeightScheme::uniform) {
    const double w = 1.0 / static_cast<double>(m);
    std::fill(weights.begin(), weights.end(), w);
    return weights;
  }
  std::size_t zeros = 0;
  for (double d : distances)
    if (d == 0.0) ++zeros;
  if (zeros > 0) {
    const double w = 1.0 / static_cast<double>(zeros);
    for (std::size_t i = 0; i < m; ++i)
      if (distances[i] == 0.0) weights[i] = w;
    return weights;
  }
  double denom = 0.0;
  for (double d : distances) denom += 1.0 / d;
  for (std::size_t i = 0; i < m; ++i)
    weights[i] = (1.0 / distances[i]) / denom;
  return weights;
}

double knn_predict_regression(const NeighborIndex& index,
                              const Targets& targets,
                              std::span<const double> x, int k,
                              WeightScheme scheme) {
  const auto nn = index.query_knn(x, k);
  const auto w = neighbor_weights(nn.distances, scheme);
  double y = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    y += w[i] * targets.values[nn.indices[i]];
  return y;
}

namespace {

std::pair<int, std::vector<double>> vote(const Labels& labels,
                                         const NeighborQueryResult& nn,
                                         const std::vector<double>& w) {
  std::vector<double> scores(labels.num_classes(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    scores[labels.values[nn.indices[i]]] += w[i];
  int best = 0;
  for (int c = 1; c < labels.num_classes(); ++c)
    if (scores[c] > scores[best]) best = c;
  return {best, scores};
}

}  // namespace

std::pair<int, std::vector<double>> knn_predict_classification(
    const NeighborIndex& index, const Labels& labels,
    std::span<const double> x, int k, WeightScheme scheme) {
  const auto nn = index.query_knn(x, k);
  return vote(labels, nn, neighbor_weights(nn.distances, scheme));
}

double radius_predict_regression(const NeighborIndex& index,
                                 const Targets& targets,
                                 std::span<const double> x, double r,
                                 WeightScheme scheme) {
  const auto nn = index.query_radius(x, r);
  const auto w = neighbor_weights(nn.distances, scheme);
  double y = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    y += w[i] * targets.values[nn.indices[i]];
  return y;
}

std::pair<int, std::vector<double>> radius_predict_classification(
    const NeighborIndex& index, const Labels& labels,
    std::span<const double> x, double r, WeightScheme scheme) {
  const auto nn = index.query_radius(x, r);
  return vote(labels, nn, neighbor_weights(nn.distances, scheme));
}

std::string kind_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::brute: return "brute";
    case IndexKind::kdtree: return "kdtree";
    case IndexKind::balltree: return "balltree";
  }
  return "unknown";
}

IndexKind kind_from_name(const std::string& name) {
  if (name == "brute") return IndexKind::brute;
  if (name == "kdtree") return IndexKind::kdtree;
  if (name == "balltree") return IndexKind::balltree;
  throw Error(ErrorCode::config, "unknown index kind: " + name);
}

std::string scheme_name(WeightScheme scheme) {
  return scheme == WeightScheme::uniform ? "uniform" : "inverse";
}

WeightScheme scheme_from_name(const std::string& name) {
  if (name == "uniform") return WeightScheme::uniform;
  if (name == "inverse") return WeightScheme::inverse;
  throw Error(ErrorCode::config, "unknown weight scheme: " + name);
}

}  // namespace neighbors
}  // namespace classicml
