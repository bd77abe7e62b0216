#include "classicml/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>

#include "classicml/parallel.hpp"

namespace classicml {
namespace trees {

bool is_regression_criterion(Criterion c) {
  return c == Criterion::mse || c == Criterion::mae;
}

double impurity_counts(Criterion c, std::span<const std::size_t> counts,
                       std::size_t total) {
  if (total == 0) {
    throw Error(ErrorCode::empty_partition, "impurity of an empty node");
  }
  const double n = static_cast<double>(total);
  switch (c) {
    case Criterion::gini: {
      double s = 0.0;
      for (std::size_t cnt : counts) {
        const double p = static_cast<double>(cnt) / n;
        s += p * (1.0 - p);
      }
      return s;
    }
    case Criterion::entropy: {
      double s = 0.0;
      for (std::size_t cnt : counts) {
        if (cnt == 0) continue;  // 0 * ln 0 := 0
        const double p = static_cast<double>(cnt) / n;
        s -= p * std::log(p);
      }
      return s;
    }
    case Criterion::misclassification: {
      std::size_t m = 0;
      for (std::size_t cnt : counts) m = std::max(m, cnt);
      return 1.0 - static_cast<double>(m) / n;
    }
    default:
      throw Error(ErrorCode::config,
                  "regression criterion applied to class counts");
  }
}

double impurity_labels(Criterion c, std::span<const int> labels,
                       int n_classes) {
  if (labels.empty()) {
    throw Error(ErrorCode::empty_partition, "impurity of an empty node");
  }
  std::vector<std::size_t> counts(n_classes, 0);
  for (int y : labels) ++counts[y];
  return impurity_counts(c, counts, labels.size());
}

double impurity_targets(Criterion c, std::span<const double> targets) {
  if (targets.empty()) {
    throw Error(ErrorCode::empty_partition, "impurity of an empty node");
  }
  const double n = static_cast<double>(targets.size());
  if (c == Criterion::mse) {
    double mean = 0.0;
    for (double y : targets) mean += y;
    mean /= n;
    double s = 0.0;
    for (double y : targets) s += (y - mean) * (y - mean);
    return s / n;
  }
  if (c == Criterion::mae) {
    std::vector<double> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[(sorted.size() - 1) / 2];  // lower median
    double s = 0.0;
    for (double y : sorted) s += std::abs(y - median);
    return s / n;
  }
  throw Error(ErrorCode::config,
              "classification criterion applied to targets");
}

namespace {

struct ValueOrder {
  double value;
  int row;

  bool operator<(const ValueOrder& o) const {
    return value < o.value || (value == o.value && row < o.row);
  }
};

// Candidate features in ascending order: all, or a uniform subset drawn
// without replacement.
std::vector<int> candidate_features(std::size_t p, int max_features,
                                    SeededRng& rng) {
  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 0);
  if (max_features >= static_cast<int>(p)) return all;
  for (int i = 0; i < max_features; ++i) {
    const std::size_t j = i + rng.uniform_int(p - i);
    std::swap(all[i], all[j]);
  }
  all.resize(max_features);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::optional<SplitCandidate> best_split(const Matrix& x,
                                         const std::vector<int>* ylabels,
                                         const std::vector<double>* ytargets,
                                         int n_classes,
                                         std::span<const int> rows,
                                         const TreeConfig& config,
                                         int max_features, bool extra,
                                         SeededRng& rng) {
  const std::size_t m = rows.size();
  const bool regression = ytargets != nullptr;

  double parent;
  std::vector<std::size_t> parent_counts;
  if (regression) {
    std::vector<double> ys(m);
    for (std::size_t i = 0; i < m; ++i) ys[i] = (*ytargets)[rows[i]];
    parent = impurity_targets(config.criterion, ys);
  } else {
    parent_counts.assign(n_classes, 0);
    for (int r : rows) ++parent_counts[(*ylabels)[r]];
    parent = impurity_counts(config.criterion, parent_counts, m);
  }
  if (parent == 0.0) return std::nullopt;  // pure node

  const auto features = candidate_features(x.cols(), max_features, rng);

  std::optional<SplitCandidate> best;
  std::vector<ValueOrder> order(m);
  std::vector<double> left_targets, right_targets;

  for (int f : features) {
    for (std::size_t i = 0; i < m; ++i) {
      order[i] = {x(rows[i], f), rows[i]};
    }
    std::sort(order.begin(), order.end());
    if (order.front().value == order.back().value) continue;

    // Evaluates the canonical split "value <= threshold goes left" where the
    //  left block is the prefix order[0..cut).
    auto evaluate = [&](std::size_t cut, double threshold) {
      const std::size_t nl = cut;
      const std::size_t nr = m - cut;
      if (nl < static_cast<std::size_t>(config.min_samples_leaf) ||
          nr < static_cast<std::size_t>(config.min_samples_leaf)) {
        return;
      }
      double left_imp, right_imp;
      if (regression) {
        left_targets.clear();
        right_targets.clear();
        for (std::size_t i = 0; i < cut; ++i)
          left_targets.push_back((*ytargets)[order[i].row]);
        for (std::size_t i = cut; i < m; ++i)
          right_targets.push_back((*ytargets)[order[i].row]);
        left_imp = impurity_targets(config.criterion, left_targets);
        right_imp = impurity_targets(config.criterion, right_targets);
      } else {
        std::vector<std::size_t> left_counts(n_classes, 0);
        for (std::size_t i = 0; i < cut; ++i)
          ++left_counts[(*ylabels)[order[i].row]];
        std::vector<std::size_t> right_counts(n_classes);
        for (int c = 0; c < n_classes; ++c)
          right_counts[c] = parent_counts[c] - left_counts[c];
        left_imp = impurity_counts(config.criterion, left_counts, nl);
        right_imp = impurity_counts(config.criterion, right_counts, nr);
      }
      const double nd = static_cast<double>(m);
      const double decrease = parent -
                              (static_cast<double>(nl) / nd) * left_imp -
                              (static_cast<double>(nr) / nd) * right_imp;
      if (!best || decrease > best->decrease) {
        best = SplitCandidate{f, threshold, decrease};
      }
    };

    if (extra) {
      const double lo = order.front().value;
      const double hi = order.back().value;
      const double threshold = lo + rng.next_double() * (hi - lo);
      std::size_t cut = 0;
      while (cut < m && order[cut].value <= threshold) ++cut;
      if (cut > 0 && cut < m) evaluate(cut, threshold);
    } else {
      for (std::size_t i = 0; i + 1 < m; ++i) {
        if (order[i].value == order[i + 1].value) continue;
        evaluate(i + 1, (order[i].value + order[i + 1].value) * 0.5);
      }
    }
  }

  if (!best || best->decrease < config.min_impurity_decrease) {
    return std::nullopt;
  }
  // Plateau splits (zero decrease on an impure node) stay eligible so that
  // parity-style label patterns still resolve deeper in the tree.
  return best;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<int>* ylabels,
              const std::vector<double>* ytargets, int n_classes,
              const TreeConfig& config, bool extra, SeededRng& rng)
      : x_(x),
        ylabels_(ylabels),
        ytargets_(ytargets),
        n_classes_(n_classes),
        config_(config),
        extra_(extra),
        rng_(rng) {
    max_features_ = config.max_features
                        ? std::min<int>(*config.max_features,
                                        static_cast<int>(x.cols()))
                        : static_cast<int>(x.cols());
    if (max_features_ < 1) {
      throw Error(ErrorCode::invalid_hyperparameter,
                  "max_features must be >= 1");
    }
  }

  Tree build(std::vector<int> rows) {
    Tree tree;
    tree.regression = ytargets_ != nullptr;
    tree.n_classes = n_classes_;
    tree_ = &tree;
    if (config_.max_leaf_nodes) {
      build_best_first(std::move(rows));
    } else {
      build_depth_first(std::move(rows), 0);
    }
    tree_ = nullptr;
    return tree;
  }

 private:
  int make_leaf(const std::vector<int>& rows) {
    TreeNode node;
    node.samples = static_cast<int>(rows.size());
    if (ytargets_ != nullptr) {
      std::vector<double> ys(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i)
        ys[i] = (*ytargets_)[rows[i]];
      if (config_.criterion == Criterion::mae) {
        std::sort(ys.begin(), ys.end());
        node.value = ys[(ys.size() - 1) / 2];
      } else {
        double mean = 0.0;
        for (double y : ys) mean += y;
        node.value = mean / static_cast<double>(ys.size());
      }
    } else {
      node.probs.assign(n_classes_, 0.0);
      for (int r : rows) node.probs[(*ylabels_)[r]] += 1.0;
      for (double& p : node.probs) p /= static_cast<double>(rows.size());
    }
    tree_->nodes.push_back(std::move(node));
    return static_cast<int>(tree_->nodes.size() - 1);
  }

  std::optional<SplitCandidate> try_split(const std::vector<int>& rows,
                                          int depth) {
    if (rows.size() < static_cast<std::size_t>(config_.min_samples_split)) {
      return std::nullopt;
    }
    if (config_.max_depth && depth >= *config_.max_depth) return std::nullopt;
    return best_split(x_, ylabels_, ytargets_, n_classes_, rows, config_,
                      max_features_, extra_, rng_);
  }

  std::pair<std::vector<int>, std::vector<int>> partition(
      const std::vector<int>& rows, const SplitCandidate& split) const {
    std::vector<int> left, right;
    for (int r : rows) {
      if (x_(r, split.feature) <= split.threshold) {
        left.push_back(r);
      } else {
        right.push_back(r);
      }
    }
    return {std::move(left), std::move(right)};
  }

  int build_depth_first(std::vector<int> rows, int depth) {
    const auto split = try_split(rows, depth);
    if (!split) return make_leaf(rows);
    auto [left_rows, right_rows] = partition(rows, *split);
    const int id = static_cast<int>(tree_->nodes.size());
    tree_->nodes.emplace_back();
    tree_->nodes[id].feature = split->feature;
    tree_->nodes[id].threshold = split->threshold;
    tree_->nodes[id].samples = static_cast<int>(rows.size());
    rows.clear();
    rows.shrink_to_fit();
    const int left = build_depth_first(std::move(left_rows), depth + 1);
    const int right = build_depth_first(std::move(right_rows), depth + 1);
    tree_->nodes[id].left = left;
    tree_->nodes[id].right = right;
    return id;
  }

  // Best-first growth expands the frontier node with the largest impurity
  // decrease until the leaf budget runs out; ties go to the earliest node.
  void build_best_first(std::vector<int> rows) {
    struct Frontier {
      double decrease;
      int order;
      int node_id;
      int depth;
      std::vector<int> rows;
      SplitCandidate split;
    };
    auto worse = [](const Frontier& a, const Frontier& b) {
      return a.decrease < b.decrease ||
             (a.decrease == b.decrease && a.order > b.order);
    };
    std::priority_queue<Frontier, std::vector<Frontier>, decltype(worse)>
        frontier(worse);

    const int max_leaves = std::max(1, *config_.max_leaf_nodes);
    int order = 0;

    // Root placeholder; replaced by a leaf payload if never split.
    const int root = make_leaf(rows);
    if (auto split = try_split(rows, 0)) {
      frontier.push({split->decrease, order++, root, 0, std::move(rows),
                     *split});
    }
    int leaves = 1;
    while (!frontier.empty() && leaves < max_leaves) {
      Frontier item = frontier.top();
      frontier.pop();
      auto [left_rows, right_rows] = partition(item.rows, item.split);

      TreeNode& node = tree_->nodes[item.node_id];
      node.feature = item.split.feature;
      node.threshold = item.split.threshold;
      node.probs.clear();
      node.value = 0.0;

      const int left = make_leaf(left_rows);
      const int right = make_leaf(right_rows);
      tree_->nodes[item.node_id].left = left;
      tree_->nodes[item.node_id].right = right;
      ++leaves;

      if (auto split = try_split(left_rows, item.depth + 1)) {
        frontier.push({split->decrease, order++, left, item.depth + 1,
                       std::move(left_rows), *split});
      }
      if (auto split = try_split(right_rows, item.depth + 1)) {
        frontier.push({split->decrease, order++, right, item.depth + 1,
                       std::move(right_rows), *split});
      }
    }
  }

  const Matrix& x_;
  const std::vector<int>* ylabels_;
  const std::vector<double>* ytargets_;
  int n_classes_;
  TreeConfig config_;
  bool extra_;
  SeededRng& rng_;
  int max_features_ = 0;
  Tree* tree_ = nullptr;
};

void validate_tree_config(const TreeConfig& config, bool regression) {
  if (is_regression_criterion(config.criterion) != regression) {
    throw Error(ErrorCode::config,
                "criterion does not match the target type");
  }
  if (config.min_samples_split < 2) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "min_samples_split must be >= 2");
  }
  if (config.min_samples_leaf < 1) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "min_samples_leaf must be >= 1");
  }
  if (config.max_depth && *config.max_depth < 0) {
    throw Error(ErrorCode::invalid_hyperparameter, "max_depth must be >= 0");
  }
  if (config.max_leaf_nodes && *config.max_leaf_nodes < 1) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "max_leaf_nodes must be >= 1");
  }
  if (config.min_impurity_decrease < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "min_impurity_decrease must be >= 0");
  }
}

Tree fit_tree_impl(const Matrix& x, const std::vector<int>* ylabels,
                   const std::vector<double>* ytargets, int n_classes,
                   const TreeConfig& config, bool extra, SeededRng& rng,
                   std::vector<int> rows) {
  TreeBuilder builder(x, ylabels, ytargets, n_classes, config, extra, rng);
  return builder.build(std::move(rows));
}

std::vector<int> all_rows(std::size_t n) {
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

Tree fit_tree(const Matrix& x, const Labels& labels, const TreeConfig& config,
              std::uint64_t seed) {
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  if (x.rows() == 0) throw Error(ErrorCode::empty_dataset, "no training rows");
  check_finite(x, "X");
  validate_tree_config(config, false);
  SeededRng rng(seed);
  return fit_tree_impl(x, &labels.values, nullptr, labels.num_classes(),
                       config, false, rng, all_rows(x.rows()));
}

Tree fit_tree(const Matrix& x, const Targets& targets,
              const TreeConfig& config, std::uint64_t seed) {
  if (x.rows() != targets.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and target counts differ");
  }
  if (x.rows() == 0) throw Error(ErrorCode::empty_dataset, "no training rows");
  check_finite(x, "X");
  check_finite(targets.values, "y");
  validate_tree_config(config, true);
  SeededRng rng(seed);
  return fit_tree_impl(x, nullptr, &targets.values, 0, config, false, rng,
                       all_rows(x.rows()));
}

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0) {
    node = row[node->feature] <= node->threshold ? &nodes[node->left]
                                                 : &nodes[node->right];
  }
  return *node;
}

std::vector<int> predict_classes(const Tree& tree, const Matrix& x) {
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto& probs = tree.leaf_for(x.row(i)).probs;
    int best = 0;
    for (std::size_t c = 1; c < probs.size(); ++c)
      if (probs[c] > probs[best]) best = static_cast<int>(c);
    out[i] = best;
  }
  return out;
}

Matrix predict_proba(const Tree& tree, const Matrix& x) {
  Matrix out(x.rows(), tree.n_classes);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto& probs = tree.leaf_for(x.row(i)).probs;
    for (std::size_t c = 0; c < probs.size(); ++c) out(i, c) = probs[c];
  }
  return out;
}

std::vector<double> predict_values(const Tree& tree, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    out[i] = tree.leaf_for(x.row(i)).value;
  return out;
}

namespace {

Forest fit_forest_impl(const Matrix& x, const std::vector<int>* ylabels,
                       const std::vector<double>* ytargets, int n_classes,
                       const ForestConfig& config) {
  if (config.n_trees < 1) {
    throw Error(ErrorCode::invalid_hyperparameter, "n_trees must be >= 1");
  }
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const bool regression = ytargets != nullptr;

  ForestConfig resolved = config;
  if (!resolved.max_features) {
    int def = regression
                  ? static_cast<int>(p) / 3
                  : static_cast<int>(std::sqrt(static_cast<double>(p)));
    resolved.max_features = std::max(1, def);
  }
  resolved.tree.max_features = resolved.max_features;

  Forest forest;
  forest.regression = regression;
  forest.n_classes = n_classes;
  forest.config = resolved;
  forest.trees.resize(resolved.n_trees);

  const auto seeds =
      SeededRng::split_seeds(resolved.seed, resolved.n_trees);
  std::vector<std::optional<std::pair<ErrorCode, std::string>>> errors(
      resolved.n_trees);
  parallel_for(resolved.n_trees, [&](std::size_t t) {
    try {
      SeededRng rng(seeds[t]);
      std::vector<int> rows;
      if (resolved.bootstrap) {
        rows.resize(n);
        for (std::size_t i = 0; i < n; ++i)
          rows[i] = static_cast<int>(rng.uniform_int(n));
      } else {
        rows = all_rows(n);
      }
      forest.trees[t] = fit_tree_impl(x, ylabels, ytargets, n_classes,
                                      resolved.tree, resolved.extra, rng,
                                      std::move(rows));
    } catch (const Error& e) {
      errors[t] = {e.code(), e.what()};
    } catch (const std::exception& e) {
      errors[t] = {ErrorCode::config, e.what()};
    }
  });
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (errors[t]) {
      throw Error(errors[t]->first,
                  "tree " + std::to_string(t) + ": " + errors[t]->second);
    }
  }
  return forest;
}

}  // namespace

Forest fit_forest(const Matrix& x, const Labels& labels,
                  const ForestConfig& config) {
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  if (x.rows() == 0) throw Error(ErrorCode::empty_dataset, "no training rows");
  check_finite(x, "X");
  validate_tree_config(config.tree, false);
  return fit_forest_impl(x, &labels.values, nullptr, labels.num_classes(),
                         config);
}

Forest fit_forest(const Matrix& x, const Targets& targets,
                  const ForestConfig& config) {
  if (x.rows() != targets.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and target counts differ");
  }
  if (x.rows() == 0) throw Error(ErrorCode::empty_dataset, "no training rows");
  check_finite(x, "X");
  check_finite(targets.values, "y");
  validate_tree_config(config.tree, true);
  return fit_forest_impl(x, nullptr, &targets.values, 0, config);
}

std::vector<int> forest_predict_classes(const Forest& forest,
                                        const Matrix& x) {
  std::vector<int> out(x.rows());
  if (forest.config.voting == Voting::soft) {
    const Matrix probs = forest_predict_proba(forest, x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      int best = 0;
      for (int c = 1; c < forest.n_classes; ++c)
        if (probs(i, c) > probs(i, best)) best = c;
      out[i] = best;
    }
    return out;
  }
  // Hard voting: modal predicted class, ties to the lowest class index.
  Matrix votes(x.rows(), forest.n_classes);
  for (const Tree& tree : forest.trees) {
    const auto preds = predict_classes(tree, x);
    for (std::size_t i = 0; i < x.rows(); ++i) votes(i, preds[i]) += 1.0;
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < forest.n_classes; ++c)
      if (votes(i, c) > votes(i, best)) best = c;
    out[i] = best;
  }
  return out;
}

Matrix forest_predict_proba(const Forest& forest, const Matrix& x) {
  Matrix out(x.rows(), forest.n_classes);
  for (const Tree& tree : forest.trees) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto& probs = tree.leaf_for(x.row(i)).probs;
      for (int c = 0; c < forest.n_classes; ++c) out(i, c) += probs[c];
    }
  }
  const double count = static_cast<double>(forest.trees.size());
  for (double& v : out.data()) v /= count;
  return out;
}

std::vector<double> forest_predict_values(const Forest& forest,
                                          const Matrix& x) {
  std::vector<double> out(x.rows(), 0.0);
  for (const Tree& tree : forest.trees) {
    const auto preds = predict_values(tree, x);
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] += preds[i];
  }
  for (double& v : out) v /= static_cast<double>(forest.trees.size());
  return out;
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::gini: return "gini";
    case Criterion::entropy: return "entropy";
    case Criterion::misclassification: return "misclassification";
    case Criterion::mse: return "mse";
    case Criterion::mae: return "mae";
  }
  return "unknown";
}

Criterion criterion_from_name(const std::string& name) {
  if (name == "gini") return Criterion::gini;
  if (name == "entropy") return Criterion::entropy;
  if (name == "misclassification") return Criterion::misclassification;
  if (name == "mse") return Criterion::mse;
  if (name == "mae") return Criterion::mae;
  throw Error(ErrorCode::config, "unknown criterion: " + name);
}

}  // namespace trees
}  // namespace classicml
