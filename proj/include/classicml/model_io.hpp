#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "classicml/clustering.hpp"
#include "classicml/core.hpp"
#include "classicml/csv.hpp"
#include "classicml/decomposition.hpp"
#include "classicml/gaussian.hpp"
#include "classicml/kernels.hpp"
#include "classicml/linear_models.hpp"
#include "classicml/multiclass.hpp"
#include "classicml/neighbors.hpp"
#include "classicml/svm.hpp"
#include "classicml/trees.hpp"

namespace classicml {
namespace model_io {

inline constexpr int kFormatVersion = 1;

// Optional per-feature standardization learned on the training data and
// replayed before prediction or transformation.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;  // zero-variance features store 1
};

Matrix apply_standardizer(const Standardizer& s, const Matrix& x);

// Nearest-neighbor models keep their (possibly standardized) training set;
// the index is rebuilt deterministically on load.
struct KnnModel {
  Matrix train_x;
  std::optional<Labels> labels;
  std::optional<Targets> targets;
  int k = 5;
  neighbors::WeightScheme scheme = neighbors::WeightScheme::uniform;
  neighbors::IndexKind index_kind = neighbors::IndexKind::kdtree;
  int leaf_size = 30;
  std::optional<double> radius;  // radius mode when set
};

struct TreePack {
  trees::Tree tree;
  std::optional<Labels> classes;
};

struct ForestPack {
  trees::Forest forest;
  std::optional<Labels> classes;
};

struct LdaProjPack {
  decomposition::LdaProjection projection;
  Labels classes;
};

using Payload =
    std::variant<KnnModel, linear::LinearModel, linear::LogisticModel,
                 svm::SvmModel, kernels::KernelRidgeModel,
                 multiclass::MultinomialModel, multiclass::OvrModel,
                 multiclass::OvoModel, multiclass::EcocModel,
                 gaussian::GaussianClassifier, TreePack, ForestPack,
                 clustering::KMeansModel, clustering::GmmModel,
                 decomposition::PcaModel, LdaProjPack,
                 kernels::KernelPcaModel>;

struct FittedModel {
  std::string kind;  // CLI model name ("ols", "svc", "kmeans", ...)
  std::uint64_t seed = 0;
  std::size_t feature_count = 0;
  std::vector<std::string> feature_names;
  std::optional<Standardizer> standardizer;
  Payload payload;
};

// Feature matrix for a loaded model: stored column names are looked up in
// the table header (extra columns, e.g. the label, are ignored); when the
// names are absent the table must have exactly the expected column count.
// Only the selected columns are parsed, so a string-valued label column in
// the input never causes a parse failure.
Matrix select_features(const FittedModel& model, const csv::RawTable& table,
                       std::optional<std::size_t> skip_column = std::nullopt);

void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

struct Prediction {
  std::string column = "prediction";
  std::vector<std::string> values;
  std::optional<std::vector<double>> numeric;  // regression predictions
  std::optional<Matrix> proba;
  std::vector<std::string> proba_columns;
};

Prediction predict_with_model(const FittedModel& model, const Matrix& raw,
                              bool want_proba);

Matrix transform_with_model(const FittedModel& model, const Matrix& raw);

// Metric name/value pairs: accuracy for classifiers, mse and mae for
// regressors, inertia for k-means, log-likelihood for mixtures. The label
// strings may be empty for clustering models.
std::vector<std::pair<std::string, double>> evaluate_with_model(
    const FittedModel& model, const Matrix& raw_features,
    const std::vector<std::string>& label_values);

bool is_classifier_kind(const std::string& kind);
bool is_regressor_kind(const std::string& kind);
bool is_transform_kind(const std::string& kind);
bool is_cluster_kind(const std::string& kind);

}  // namespace model_io
}  // namespace classicml
