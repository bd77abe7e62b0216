// Command-line front door: CSV in, trained model files out, plus predict,
// evaluate and transform. Exit codes: 0 ok, 2 configuration error, 3 data
// error, 4 numeric/convergence error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "classicml/model_io.hpp"

namespace cml = classicml;

namespace {

struct FitOptions {
  std::string model;
  std::string input;
  std::string output;
  std::string label;
  std::string task = "classify";
  std::uint64_t seed = 0;
  bool standardize = false;

  int k = 5;
  std::string weights = "uniform";
  std::string index = "kdtree";
  int leaf_size = 30;
  double radius = 0.0;

  double lambda = 1.0;
  double alpha = 0.5;
  std::string penalty = "l2";

  std::string kernel = "rbf";
  double gamma = 1.0;
  double c0 = 0.0;
  int degree = 3;
  double cost = 1.0;
  double epsilon = 0.1;
  int iterations = 5000;

  std::string base = "logistic";
  int tasks = 0;

  std::string variance = "per-class";

  std::string criterion = "auto";
  int max_depth = -1;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int max_leaf_nodes = -1;
  int max_features = -1;
  double min_impurity_decrease = 0.0;
  int trees = 100;
  bool bootstrap_on = false;
  bool bootstrap_off = false;
  std::string voting = "soft";

  int restarts = 10;
  int max_iter = -1;
  std::string accel = "lloyd";
  double tol = 1e-6;

  int components = 2;
};

bool needs_labels(const std::string& model, const std::string& task) {
  if (model == "logistic" || model == "svc" || model == "multinomial" ||
      model == "ovr" || model == "ovo" || model == "ecoc" || model == "gnb" ||
      model == "lda" || model == "qda" || model == "lda-proj") {
    return true;
  }
  if (model == "knn" || model == "tree" || model == "forest" ||
      model == "extratrees") {
    return task == "classify";
  }
  return false;
}

bool needs_targets(const std::string& model, const std::string& task) {
  if (model == "ols" || model == "ridge" || model == "lasso" ||
      model == "elasticnet" || model == "svr" || model == "krr") {
    return true;
  }
  if (model == "knn" || model == "tree" || model == "forest" ||
      model == "extratrees") {
    return task == "regress";
  }
  return false;
}

cml::model_io::Standardizer fit_standardizer(const cml::Matrix& x) {
  cml::model_io::Standardizer s;
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  s.means.assign(p, 0.0);
  s.stds.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) s.means[j] += x(i, j);
  for (std::size_t j = 0; j < p; ++j) s.means[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x(i, j) - s.means[j];
      s.stds[j] += d * d;
    }
  for (std::size_t j = 0; j < p; ++j) {
    s.stds[j] = std::sqrt(s.stds[j] / static_cast<double>(n));
    if (s.stds[j] == 0.0) s.stds[j] = 1.0;
  }
  return s;
}

cml::kernels::KernelSpec kernel_from_options(const FitOptions& opt) {
  cml::kernels::KernelSpec spec;
  spec.kind = cml::kernels::kind_from_name(opt.kernel);
  spec.gamma = opt.gamma;
  spec.c0 = opt.c0;
  spec.degree = opt.degree;
  return spec;
}

cml::multiclass::BinaryBaseSpec base_from_options(const FitOptions& opt) {
  cml::multiclass::BinaryBaseSpec base;
  if (opt.base == "logistic") {
    base.kind = cml::multiclass::BinaryBaseSpec::Kind::logistic;
  } else if (opt.base == "svc") {
    base.kind = cml::multiclass::BinaryBaseSpec::Kind::svc;
  } else {
    throw cml::Error(cml::ErrorCode::config,
                     "unknown base learner: " + opt.base);
  }
  base.penalty = cml::linear::penalty_from_name(opt.penalty);
  base.lambda = opt.lambda;
  base.alpha = opt.alpha;
  base.kernel = kernel_from_options(opt);
  base.c = opt.cost;
  base.iterations = opt.iterations;
  return base;
}

cml::trees::TreeConfig tree_config_from_options(const FitOptions& opt,
                                                bool regression) {
  cml::trees::TreeConfig config;
  if (opt.criterion == "auto") {
    config.criterion = regression ? cml::trees::Criterion::mse
                                  : cml::trees::Criterion::gini;
  } else {
    config.criterion = cml::trees::criterion_from_name(opt.criterion);
  }
  if (opt.max_depth >= 0) config.max_depth = opt.max_depth;
  config.min_samples_split = opt.min_samples_split;
  config.min_samples_leaf = opt.min_samples_leaf;
  if (opt.max_leaf_nodes >= 0) config.max_leaf_nodes = opt.max_leaf_nodes;
  if (opt.max_features >= 0) config.max_features = opt.max_features;
  config.min_impurity_decrease = opt.min_impurity_decrease;
  return config;
}

int ecoc_tasks(int requested, int q) {
  if (requested > 0) return requested;
  if (q <= 2) return 1;
  const int min_tasks =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(q))));
  return std::max(6, min_tasks);
}

cml::model_io::Payload fit_payload(const FitOptions& opt,
                                   const cml::Matrix& x,
                                   const std::optional<cml::Labels>& labels,
                                   const std::optional<cml::Targets>& targets) {
  using cml::model_io::ForestPack;
  using cml::model_io::KnnModel;
  using cml::model_io::LdaProjPack;
  using cml::model_io::TreePack;
  const std::string& m = opt.model;

  if (m == "knn") {
    KnnModel knn;
    knn.train_x = x;
    knn.labels = labels;
    knn.targets = targets;
    knn.k = opt.k;
    knn.scheme = cml::neighbors::scheme_from_name(opt.weights);
    knn.index_kind = cml::neighbors::kind_from_name(opt.index);
    knn.leaf_size = opt.leaf_size;
    if (opt.radius > 0.0) knn.radius = opt.radius;
    if (!knn.radius && (opt.k < 1 || static_cast<std::size_t>(opt.k) > x.rows())) {
      throw cml::Error(cml::ErrorCode::invalid_hyperparameter,
                       "k must lie in [1, n]");
    }
    cml::neighbors::NeighborIndex::build(x, knn.index_kind, knn.leaf_size);
    return knn;
  }
  if (m == "ols") return cml::linear::fit_ols(x, targets->values);
  if (m == "ridge") return cml::linear::fit_ridge(x, targets->values, opt.lambda);
  if (m == "lasso") return cml::linear::fit_lasso(x, targets->values, opt.lambda);
  if (m == "elasticnet") {
    return cml::linear::fit_elastic_net(x, targets->values, opt.lambda,
                                        opt.alpha);
  }
  if (m == "logistic") {
    if (labels->num_classes() > 2) {
      throw cml::Error(cml::ErrorCode::config,
                       "logistic regression is binary; use --model "
                       "multinomial, ovr, ovo or ecoc for " +
                           std::to_string(labels->num_classes()) + " classes");
    }
    return cml::linear::fit_logistic(
        x, *labels, cml::linear::penalty_from_name(opt.penalty), opt.lambda,
        opt.alpha);
  }
  if (m == "svc") {
    if (labels->num_classes() > 2) {
      throw cml::Error(cml::ErrorCode::config,
                       "svc is binary; use --model ovr, ovo or ecoc for " +
                           std::to_string(labels->num_classes()) + " classes");
    }
    return cml::svm::fit_svc(x, *labels, kernel_from_options(opt), opt.cost,
                             opt.iterations);
  }
  if (m == "svr") {
    return cml::svm::fit_svr(x, targets->values, kernel_from_options(opt),
                             opt.cost, opt.epsilon, opt.iterations);
  }
  if (m == "krr") {
    return cml::kernels::fit_kernel_ridge(x, targets->values,
                                          kernel_from_options(opt),
                                          opt.lambda);
  }
  if (m == "multinomial") {
    return cml::multiclass::fit_multinomial(x, *labels, opt.lambda);
  }
  if (m == "ovr") {
    return cml::multiclass::ovr_fit(x, *labels, base_from_options(opt));
  }
  if (m == "ovo") {
    return cml::multiclass::ovo_fit(x, *labels, base_from_options(opt));
  }
  if (m == "ecoc") {
    return cml::multiclass::ecoc_fit(
        x, *labels, base_from_options(opt),
        ecoc_tasks(opt.tasks, labels->num_classes()), opt.seed);
  }
  if (m == "gnb") {
    const auto kind = opt.variance == "shared"
                          ? cml::gaussian::Kind::nb_shared_var
                          : cml::gaussian::Kind::nb_per_class_var;
    return cml::gaussian::fit_gaussian(x, *labels, kind);
  }
  if (m == "lda") {
    return cml::gaussian::fit_gaussian(x, *labels, cml::gaussian::Kind::lda);
  }
  if (m == "qda") {
    return cml::gaussian::fit_gaussian(x, *labels, cml::gaussian::Kind::qda);
  }
  if (m == "tree") {
    TreePack pack;
    if (labels) {
      pack.tree = cml::trees::fit_tree(x, *labels,
                                       tree_config_from_options(opt, false),
                                       opt.seed);
      pack.classes = labels;
    } else {
      pack.tree = cml::trees::fit_tree(x, *targets,
                                       tree_config_from_options(opt, true),
                                       opt.seed);
    }
    return pack;
  }
  if (m == "forest" || m == "extratrees") {
    cml::trees::ForestConfig config;
    config.n_trees = opt.trees;
    config.extra = m == "extratrees";
    config.bootstrap = config.extra ? opt.bootstrap_on
                                    : !opt.bootstrap_off;
    if (opt.max_features >= 0) config.max_features = opt.max_features;
    config.voting = opt.voting == "hard" ? cml::trees::Voting::hard
                                         : cml::trees::Voting::soft;
    config.seed = opt.seed;
    ForestPack pack;
    if (labels) {
      config.tree = tree_config_from_options(opt, false);
      pack.forest = cml::trees::fit_forest(x, *labels, config);
      pack.classes = labels;
    } else {
      config.tree = tree_config_from_options(opt, true);
      pack.forest = cml::trees::fit_forest(x, *targets, config);
    }
    return pack;
  }
  if (m == "kmeans") {
    return cml::clustering::kmeans_fit(
        x, opt.k, opt.restarts, opt.max_iter > 0 ? opt.max_iter : 300,
        cml::clustering::accel_from_name(opt.accel), opt.seed);
  }
  if (m == "gmm") {
    return cml::clustering::gmm_fit_em(
        x, opt.k, opt.max_iter > 0 ? opt.max_iter : 200, opt.tol, opt.seed);
  }
  if (m == "pca") return cml::decomposition::pca_fit(x, opt.components);
  if (m == "lda-proj") {
    auto [proj, transformed] =
        cml::decomposition::lda_fit_transform(x, *labels, opt.components);
    (void)transformed;
    return LdaProjPack{std::move(proj), *labels};
  }
  if (m == "kpca") {
    return cml::kernels::kernel_pca_fit(x, kernel_from_options(opt),
                                        opt.components);
  }
  throw cml::Error(cml::ErrorCode::config, "unknown model kind: " + m);
}

int cmd_fit(const FitOptions& opt) {
  const bool want_labels = needs_labels(opt.model, opt.task);
  const bool want_targets = needs_targets(opt.model, opt.task);
  if ((want_labels || want_targets) && opt.label.empty()) {
    throw cml::Error(cml::ErrorCode::config,
                     "--model " + opt.model + " requires --label");
  }

  const auto table = cml::csv::load_csv(
      opt.input,
      opt.label.empty() ? std::nullopt
                        : std::optional<std::string>(opt.label));

  std::optional<cml::Labels> labels;
  std::optional<cml::Targets> targets;
  if (want_labels) labels = cml::csv::table_labels(table);
  if (want_targets) targets = cml::csv::table_targets(table);

  cml::model_io::FittedModel model;
  model.kind = opt.model;
  model.seed = opt.seed;
  model.feature_count = table.features.cols();
  model.feature_names = table.feature_names;

  cml::Matrix x = table.features;
  if (opt.standardize) {
    model.standardizer = fit_standardizer(x);
    x = cml::model_io::apply_standardizer(*model.standardizer, x);
  }

  model.payload = fit_payload(opt, x, labels, targets);
  cml::model_io::save_model(model, opt.output);
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input,
                const std::string& output, bool proba) {
  const auto model = cml::model_io::load_model(model_path);
  const auto table = cml::csv::read_raw(input);
  const cml::Matrix x = cml::model_io::select_features(model, table);
  const auto pred = cml::model_io::predict_with_model(model, x, proba);

  std::vector<std::string> header{pred.column};
  for (const auto& name : pred.proba_columns) header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(pred.values.size());
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    std::vector<std::string> row{pred.values[i]};
    if (pred.proba) {
      for (std::size_t c = 0; c < pred.proba->cols(); ++c)
        row.push_back(cml::csv::format_value((*pred.proba)(i, c)));
    }
    rows.push_back(std::move(row));
  }
  cml::csv::write_csv(output, header, rows);
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& input,
                 const std::string& label) {
  const auto model = cml::model_io::load_model(model_path);
  const bool clustering = cml::model_io::is_cluster_kind(model.kind);
  if (label.empty() && !clustering) {
    throw cml::Error(cml::ErrorCode::config, "evaluate requires --label");
  }
  const auto table = cml::csv::read_raw(input);
  std::optional<std::size_t> label_index;
  std::vector<std::string> label_values;
  if (!label.empty()) {
    label_index = table.find_column(label);
    if (!label_index) {
      throw cml::Error(cml::ErrorCode::config,
                       "label column '" + label + "' not found in " + input);
    }
    label_values = cml::csv::column_strings(table, *label_index);
  }
  const cml::Matrix x =
      cml::model_io::select_features(model, table, label_index);
  for (const auto& [name, value] :
       cml::model_io::evaluate_with_model(model, x, label_values)) {
    std::printf("%s=%.6f\n", name.c_str(), value);
  }
  return 0;
}

int cmd_transform(const std::string& model_path, const std::string& input,
                  const std::string& output) {
  const auto model = cml::model_io::load_model(model_path);
  const auto table = cml::csv::read_raw(input);
  const cml::Matrix x = cml::model_io::select_features(model, table);
  const cml::Matrix t = cml::model_io::transform_with_model(model, x);

  if (const auto* pca =
          std::get_if<cml::decomposition::PcaModel>(&model.payload)) {
    std::fprintf(stderr, "pc1_variance_ratio=%.6f\n",
                 pca->explained_variance_ratio.front());
  }

  std::vector<std::string> header;
  for (std::size_t c = 0; c < t.cols(); ++c)
    header.push_back("comp_" + std::to_string(c + 1));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < t.cols(); ++c)
      row.push_back(cml::csv::format_value(t(i, c)));
    rows.push_back(std::move(row));
  }
  cml::csv::write_csv(output, header, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classicml: classic machine-learning trainer and predictor"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "train a model and write it out");
  fit_cmd->add_option("--model", fit.model,
                      "one of: knn ols ridge lasso elasticnet logistic svc "
                      "svr krr multinomial ovr ovo ecoc gnb lda qda tree "
                      "forest extratrees kmeans gmm pca lda-proj kpca")
      ->required();
  fit_cmd->add_option("--in", fit.input, "training CSV")->required();
  fit_cmd->add_option("--out", fit.output, "model file to write")->required();
  fit_cmd->add_option("--label", fit.label, "label column name");
  fit_cmd->add_option("--task", fit.task, "classify|regress (knn/tree/forest)")
      ->check(CLI::IsMember({"classify", "regress"}));
  fit_cmd->add_option("--seed", fit.seed, "RNG seed (default 0)");
  fit_cmd->add_flag("--standardize", fit.standardize,
                    "standardize features; stored in the model file");
  fit_cmd->add_option("--k", fit.k, "neighbors (knn) or clusters (kmeans/gmm)");
  fit_cmd->add_option("--weights", fit.weights, "uniform|inverse")
      ->check(CLI::IsMember({"uniform", "inverse"}));
  fit_cmd->add_option("--index", fit.index, "brute|kdtree|balltree")
      ->check(CLI::IsMember({"brute", "kdtree", "balltree"}));
  fit_cmd->add_option("--leaf-size", fit.leaf_size, "tree index leaf size");
  fit_cmd->add_option("--radius", fit.radius,
                      "radius neighborhood instead of k (knn)");
  fit_cmd->add_option("--lambda", fit.lambda, "penalty strength");
  fit_cmd->add_option("--alpha", fit.alpha, "elastic-net l1 fraction");
  fit_cmd->add_option("--penalty", fit.penalty, "none|l2|l1|elasticnet")
      ->check(CLI::IsMember({"none", "l2", "l1", "elasticnet"}));
  fit_cmd->add_option("--kernel", fit.kernel,
                      "linear|polynomial|sigmoid|rbf")
      ->check(CLI::IsMember({"linear", "polynomial", "sigmoid", "rbf"}));
  fit_cmd->add_option("--gamma", fit.gamma, "kernel gamma");
  fit_cmd->add_option("--c0", fit.c0, "kernel constant term");
  fit_cmd->add_option("--degree", fit.degree, "polynomial degree");
  fit_cmd->add_option("--C", fit.cost, "SVM cost parameter");
  fit_cmd->add_option("--epsilon", fit.epsilon, "SVR tube width");
  fit_cmd->add_option("--iterations", fit.iterations, "SVM iterations");
  fit_cmd->add_option("--base", fit.base, "logistic|svc (ovr/ovo/ecoc)")
      ->check(CLI::IsMember({"logistic", "svc"}));
  fit_cmd->add_option("--tasks", fit.tasks, "ECOC binary task count");
  fit_cmd->add_option("--variance", fit.variance, "per-class|shared (gnb)")
      ->check(CLI::IsMember({"per-class", "shared"}));
  fit_cmd->add_option("--criterion", fit.criterion,
                      "gini|entropy|misclassification|mse|mae");
  fit_cmd->add_option("--max-depth", fit.max_depth, "tree depth cap");
  fit_cmd->add_option("--min-samples-split", fit.min_samples_split,
                      "minimum node size to split");
  fit_cmd->add_option("--min-samples-leaf", fit.min_samples_leaf,
                      "minimum leaf size");
  fit_cmd->add_option("--max-leaf-nodes", fit.max_leaf_nodes,
                      "leaf budget (best-first growth)");
  fit_cmd->add_option("--max-features", fit.max_features,
                      "features considered per split");
  fit_cmd->add_option("--min-impurity-decrease", fit.min_impurity_decrease,
                      "minimum decrease to accept a split");
  fit_cmd->add_option("--trees", fit.trees, "ensemble size");
  fit_cmd->add_flag("--bootstrap", fit.bootstrap_on,
                    "bootstrap rows (extratrees: off unless given)");
  fit_cmd->add_flag("--no-bootstrap", fit.bootstrap_off,
                    "disable bootstrapping (forest)");
  fit_cmd->add_option("--voting", fit.voting, "hard|soft")
      ->check(CLI::IsMember({"hard", "soft"}));
  fit_cmd->add_option("--restarts", fit.restarts, "k-means restarts");
  fit_cmd->add_option("--max-iter", fit.max_iter,
                      "iteration cap (kmeans/gmm)");
  fit_cmd->add_option("--accel", fit.accel, "lloyd|elkan")
      ->check(CLI::IsMember({"lloyd", "elkan"}));
  fit_cmd->add_option("--tol", fit.tol, "EM log-likelihood tolerance");
  fit_cmd->add_option("--components", fit.components,
                      "projection dimensions (pca/lda-proj/kpca)");

  std::string model_path, in_path, out_path, label;
  bool proba = false;

  auto* predict_cmd = app.add_subcommand("predict", "predict with a model");
  predict_cmd->add_option("--model-file", model_path)->required();
  predict_cmd->add_option("--in", in_path)->required();
  predict_cmd->add_option("--out", out_path)->required();
  predict_cmd->add_flag("--proba", proba, "emit per-class probabilities");

  auto* eval_cmd = app.add_subcommand("evaluate", "report metrics on a file");
  eval_cmd->add_option("--model-file", model_path)->required();
  eval_cmd->add_option("--in", in_path)->required();
  eval_cmd->add_option("--label", label, "label column name");

  auto* transform_cmd =
      app.add_subcommand("transform", "project with pca/lda-proj/kpca");
  transform_cmd->add_option("--model-file", model_path)->required();
  transform_cmd->add_option("--in", in_path)->required();
  transform_cmd->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (predict_cmd->parsed())
      return cmd_predict(model_path, in_path, out_path, proba);
    if (eval_cmd->parsed()) return cmd_evaluate(model_path, in_path, label);
    if (transform_cmd->parsed())
      return cmd_transform(model_path, in_path, out_path);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const cml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
