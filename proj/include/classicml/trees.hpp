#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "classicml/core.hpp"
#include "classicml/rng.hpp"

namespace classicml {
namespace trees {

enum class Criterion { gini, entropy, misclassification, mse, mae };

bool is_regression_criterion(Criterion c);

struct TreeConfig {
  Criterion criterion = Criterion::gini;
  std::optional<int> max_depth;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  std::optional<int> max_leaf_nodes;
  std::optional<int> max_features;
  double min_impurity_decrease = 0.0;
};

// Flat node storage; feature < 0 marks a leaf. Routing: x[feature] <=
// threshold goes left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> probs;  // classification leaf: class proportions
  double value = 0.0;         // regression leaf: mean (mse) or median (mae)
  int samples = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  bool regression = false;
  int n_classes = 0;

  const TreeNode& leaf_for(std::span<const double> row) const;
};

// Node impurity. Classification criteria work on class counts so that every
// code path (splitter, oracle, leaf payloads) computes identical values.
double impurity_counts(Criterion c, std::span<const std::size_t> counts,
                       std::size_t total);
double impurity_labels(Criterion c, std::span<const int> labels,
                       int n_classes);
double impurity_targets(Criterion c, std::span<const double> targets);

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

// Best (feature, threshold) pair over the candidate features: all of them,
// or a uniform random subset of size max_features. Standard trees try the
// midpoints of consecutive distinct sorted values; extremely randomized
// trees draw one uniform threshold per candidate feature. Ties go to the
// lowest feature index, then the lowest threshold. Returns nullopt for pure
// nodes and when no candidate satisfies min_samples_leaf and
// min_impurity_decrease. Zero-decrease splits of impure nodes are kept:
// parity-style patterns need them to resolve at deeper levels.
std::optional<SplitCandidate> best_split(const Matrix& x,
                                         const std::vector<int>* ylabels,
                                         const std::vector<double>* ytargets,
                                         int n_classes,
                                         std::span<const int> rows,
                                         const TreeConfig& config,
                                         int max_features, bool extra,
                                         SeededRng& rng);

Tree fit_tree(const Matrix& x, const Labels& labels, const TreeConfig& config,
              std::uint64_t seed = 0);
Tree fit_tree(const Matrix& x, const Targets& targets,
              const TreeConfig& config, std::uint64_t seed = 0);

std::vector<int> predict_classes(const Tree& tree, const Matrix& x);
Matrix predict_proba(const Tree& tree, const Matrix& x);
std::vector<double> predict_values(const Tree& tree, const Matrix& x);

enum class Voting { hard, soft };

struct ForestConfig {
  int n_trees = 100;
  bool bootstrap = true;  // extremely randomized trees default this off
  std::optional<int> max_features;  // default sqrt(p) classif., p/3 regr.
  Voting voting = Voting::soft;
  TreeConfig tree;
  std::uint64_t seed = 0;
  bool extra = false;
};

struct Forest {
  std::vector<Tree> trees;
  bool regression = false;
  int n_classes = 0;
  ForestConfig config;
};

// Trees are fitted on independent RNG streams from rng_split(seed, n_trees)
// and stored by tree index, so any fitting schedule gives the same forest.
Forest fit_forest(const Matrix& x, const Labels& labels,
                  const ForestConfig& config);
Forest fit_forest(const Matrix& x, const Targets& targets,
                  const ForestConfig& config);

std::vector<int> forest_predict_classes(const Forest& forest, const Matrix& x);
Matrix forest_predict_proba(const Forest& forest, const Matrix& x);
std::vector<double> forest_predict_values(const Forest& forest,
                                          const Matrix& x);

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

}  // namespace trees
}  // namespace classicml
