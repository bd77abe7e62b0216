#include "classicml/model_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace classicml {
namespace model_io {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(),
                j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

json labels_to_json(const Labels& l) {
  return json{{"values", l.values}, {"names", l.names}};
}

Labels labels_from_json(const json& j) {
  Labels l;
  l.values = j.at("values").get<std::vector<int>>();
  l.names = j.at("names").get<std::vector<std::string>>();
  return l;
}

json kernel_to_json(const kernels::KernelSpec& k) {
  return json{{"kind", kernels::kind_name(k.kind)},
              {"gamma", k.gamma},
              {"c0", k.c0},
              {"degree", k.degree}};
}

kernels::KernelSpec kernel_from_json(const json& j) {
  kernels::KernelSpec k;
  k.kind = kernels::kind_from_name(j.at("kind").get<std::string>());
  k.gamma = j.at("gamma").get<double>();
  k.c0 = j.at("c0").get<double>();
  k.degree = j.at("degree").get<int>();
  return k;
}

json knn_to_json(const KnnModel& m) {
  json j{{"train_x", matrix_to_json(m.train_x)},
         {"k", m.k},
         {"weights", neighbors::scheme_name(m.scheme)},
         {"index", neighbors::kind_name(m.index_kind)},
         {"leaf_size", m.leaf_size}};
  if (m.labels) j["labels"] = labels_to_json(*m.labels);
  if (m.targets) j["targets"] = m.targets->values;
  if (m.radius) j["radius"] = *m.radius;
  return j;
}

KnnModel knn_from_json(const json& j) {
  KnnModel m;
  m.train_x = matrix_from_json(j.at("train_x"));
  m.k = j.at("k").get<int>();
  m.scheme = neighbors::scheme_from_name(j.at("weights").get<std::string>());
  m.index_kind = neighbors::kind_from_name(j.at("index").get<std::string>());
  m.leaf_size = j.at("leaf_size").get<int>();
  if (j.contains("labels")) m.labels = labels_from_json(j.at("labels"));
  if (j.contains("targets"))
    m.targets = Targets{j.at("targets").get<std::vector<double>>()};
  if (j.contains("radius")) m.radius = j.at("radius").get<double>();
  return m;
}

json linear_to_json(const linear::LinearModel& m) {
  return json{{"intercept", m.intercept},
              {"coef", m.coef},
              {"penalty", linear::penalty_name(m.penalty)},
              {"lambda", m.lambda},
              {"alpha", m.alpha},
              {"has_intercept", m.has_intercept}};
}

linear::LinearModel linear_from_json(const json& j) {
  linear::LinearModel m;
  m.intercept = j.at("intercept").get<double>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.penalty = linear::penalty_from_name(j.at("penalty").get<std::string>());
  m.lambda = j.at("lambda").get<double>();
  m.alpha = j.at("alpha").get<double>();
  m.has_intercept = j.at("has_intercept").get<bool>();
  return m;
}

json logistic_to_json(const linear::LogisticModel& m) {
  return json{{"intercept", m.intercept},
              {"coef", m.coef},
              {"classes", labels_to_json(m.classes)},
              {"penalty", linear::penalty_name(m.penalty)},
              {"lambda", m.lambda},
              {"alpha", m.alpha},
              {"iterations", m.iterations}};
}

linear::LogisticModel logistic_from_json(const json& j) {
  linear::LogisticModel m;
  m.intercept = j.at("intercept").get<double>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.classes = labels_from_json(j.at("classes"));
  m.penalty = linear::penalty_from_name(j.at("penalty").get<std::string>());
  m.lambda = j.at("lambda").get<double>();
  m.alpha = j.at("alpha").get<double>();
  m.iterations = j.at("iterations").get<int>();
  return m;
}

json svm_to_json(const svm::SvmModel& m) {
  json j{{"regression", m.regression},
         {"kernel", kernel_to_json(m.kernel)},
         {"C", m.c},
         {"epsilon", m.epsilon},
         {"alpha", m.alpha},
         {"support_indices", m.support_indices},
         {"support_vectors", matrix_to_json(m.support_vectors)},
         {"objective", m.objective},
         {"iterations", m.iterations}};
  if (!m.regression) j["classes"] = labels_to_json(m.classes);
  return j;
}

svm::SvmModel svm_from_json(const json& j) {
  svm::SvmModel m;
  m.regression = j.at("regression").get<bool>();
  m.kernel = kernel_from_json(j.at("kernel"));
  m.c = j.at("C").get<double>();
  m.epsilon = j.at("epsilon").get<double>();
  m.alpha = j.at("alpha").get<std::vector<double>>();
  m.support_indices = j.at("support_indices").get<std::vector<int>>();
  m.support_vectors = matrix_from_json(j.at("support_vectors"));
  m.objective = j.at("objective").get<double>();
  m.iterations = j.at("iterations").get<int>();
  if (j.contains("classes")) m.classes = labels_from_json(j.at("classes"));
  return m;
}

json krr_to_json(const kernels::KernelRidgeModel& m) {
  return json{{"train_x", matrix_to_json(m.train_x)},
              {"alpha", m.alpha},
              {"lambda", m.lambda},
              {"kernel", kernel_to_json(m.kernel)}};
}

kernels::KernelRidgeModel krr_from_json(const json& j) {
  kernels::KernelRidgeModel m;
  m.train_x = matrix_from_json(j.at("train_x"));
  m.alpha = j.at("alpha").get<std::vector<double>>();
  m.lambda = j.at("lambda").get<double>();
  m.kernel = kernel_from_json(j.at("kernel"));
  return m;
}

json multinomial_to_json(const multiclass::MultinomialModel& m) {
  return json{{"weights", matrix_to_json(m.weights)},
              {"classes", labels_to_json(m.classes)},
              {"lambda", m.lambda},
              {"iterations", m.iterations}};
}

multiclass::MultinomialModel multinomial_from_json(const json& j) {
  multiclass::MultinomialModel m;
  m.weights = matrix_from_json(j.at("weights"));
  m.classes = labels_from_json(j.at("classes"));
  m.lambda = j.at("lambda").get<double>();
  m.iterations = j.at("iterations").get<int>();
  return m;
}

json base_spec_to_json(const multiclass::BinaryBaseSpec& s) {
  return json{
      {"kind",
       s.kind == multiclass::BinaryBaseSpec::Kind::logistic ? "logistic"
                                                            : "svc"},
      {"penalty", linear::penalty_name(s.penalty)},
      {"lambda", s.lambda},
      {"alpha", s.alpha},
      {"kernel", kernel_to_json(s.kernel)},
      {"C", s.c},
      {"iterations", s.iterations}};
}

multiclass::BinaryBaseSpec base_spec_from_json(const json& j) {
  multiclass::BinaryBaseSpec s;
  s.kind = j.at("kind").get<std::string>() == "logistic"
               ? multiclass::BinaryBaseSpec::Kind::logistic
               : multiclass::BinaryBaseSpec::Kind::svc;
  s.penalty = linear::penalty_from_name(j.at("penalty").get<std::string>());
  s.lambda = j.at("lambda").get<double>();
  s.alpha = j.at("alpha").get<double>();
  s.kernel = kernel_from_json(j.at("kernel"));
  s.c = j.at("C").get<double>();
  s.iterations = j.at("iterations").get<int>();
  return s;
}

json base_model_to_json(const multiclass::BinaryBaseModel& m) {
  if (std::holds_alternative<linear::LogisticModel>(m.model)) {
    return json{{"type", "logistic"},
                {"model",
                 logistic_to_json(std::get<linear::LogisticModel>(m.model))}};
  }
  return json{{"type", "svc"},
              {"model", svm_to_json(std::get<svm::SvmModel>(m.model))}};
}

multiclass::BinaryBaseModel base_model_from_json(const json& j) {
  multiclass::BinaryBaseModel m;
  if (j.at("type").get<std::string>() == "logistic") {
    m.model = logistic_from_json(j.at("model"));
  } else {
    m.model = svm_from_json(j.at("model"));
  }
  return m;
}

json ovr_to_json(const multiclass::OvrModel& m) {
  json models = json::array();
  for (const auto& b : m.models) models.push_back(base_model_to_json(b));
  return json{{"base", base_spec_to_json(m.base)},
              {"models", models},
              {"classes", labels_to_json(m.classes)}};
}

multiclass::OvrModel ovr_from_json(const json& j) {
  multiclass::OvrModel m;
  m.base = base_spec_from_json(j.at("base"));
  for (const auto& b : j.at("models")) m.models.push_back(base_model_from_json(b));
  m.classes = labels_from_json(j.at("classes"));
  return m;
}

json ovo_to_json(const multiclass::OvoModel& m) {
  json models = json::array();
  for (const auto& b : m.models) models.push_back(base_model_to_json(b));
  json pairs = json::array();
  for (const auto& [a, b] : m.pairs) pairs.push_back(json::array({a, b}));
  return json{{"base", base_spec_to_json(m.base)},
              {"pairs", pairs},
              {"models", models},
              {"classes", labels_to_json(m.classes)}};
}

multiclass::OvoModel ovo_from_json(const json& j) {
  multiclass::OvoModel m;
  m.base = base_spec_from_json(j.at("base"));
  for (const auto& p : j.at("pairs"))
    m.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  for (const auto& b : j.at("models")) m.models.push_back(base_model_from_json(b));
  m.classes = labels_from_json(j.at("classes"));
  return m;
}

json ecoc_to_json(const multiclass::EcocModel& m) {
  json models = json::array();
  for (const auto& b : m.models) models.push_back(base_model_to_json(b));
  return json{{"base", base_spec_to_json(m.base)},
              {"codebook", matrix_to_json(m.codebook)},
              {"models", models},
              {"classes", labels_to_json(m.classes)},
              {"seed", m.seed}};
}

multiclass::EcocModel ecoc_from_json(const json& j) {
  multiclass::EcocModel m;
  m.base = base_spec_from_json(j.at("base"));
  m.codebook = matrix_from_json(j.at("codebook"));
  for (const auto& b : j.at("models")) m.models.push_back(base_model_from_json(b));
  m.classes = labels_from_json(j.at("classes"));
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

json gaussian_to_json(const gaussian::GaussianClassifier& m) {
  json covs = json::array();
  for (const auto& c : m.class_covariance) covs.push_back(matrix_to_json(c));
  json quads = json::array();
  for (const auto& w : m.quad) quads.push_back(matrix_to_json(w));
  return json{{"kind", gaussian::kind_name(m.kind)},
              {"classes", labels_to_json(m.classes)},
              {"means", matrix_to_json(m.means)},
              {"priors", m.priors},
              {"class_variance", m.class_variance},
              {"shared_variance", m.shared_variance},
              {"pooled_covariance", matrix_to_json(m.pooled_covariance)},
              {"class_covariance", covs},
              {"quad", quads},
              {"lin", matrix_to_json(m.lin)},
              {"intercept", m.intercept}};
}

gaussian::GaussianClassifier gaussian_from_json(const json& j) {
  gaussian::GaussianClassifier m;
  m.kind = gaussian::kind_from_name(j.at("kind").get<std::string>());
  m.classes = labels_from_json(j.at("classes"));
  m.means = matrix_from_json(j.at("means"));
  m.priors = j.at("priors").get<std::vector<double>>();
  m.class_variance = j.at("class_variance").get<std::vector<double>>();
  m.shared_variance = j.at("shared_variance").get<double>();
  m.pooled_covariance = matrix_from_json(j.at("pooled_covariance"));
  for (const auto& c : j.at("class_covariance"))
    m.class_covariance.push_back(matrix_from_json(c));
  for (const auto& w : j.at("quad")) m.quad.push_back(matrix_from_json(w));
  m.lin = matrix_from_json(j.at("lin"));
  m.intercept = j.at("intercept").get<std::vector<double>>();
  return m;
}

json tree_to_json(const trees::Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back(json{{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"p", n.probs},
                         {"v", n.value},
                         {"n", n.samples}});
  }
  return json{{"nodes", nodes},
              {"regression", t.regression},
              {"n_classes", t.n_classes}};
}

trees::Tree tree_from_json(const json& j) {
  trees::Tree t;
  for (const auto& n : j.at("nodes")) {
    trees::TreeNode node;
    node.feature = n.at("f").get<int>();
    node.threshold = n.at("t").get<double>();
    node.left = n.at("l").get<int>();
    node.right = n.at("r").get<int>();
    node.probs = n.at("p").get<std::vector<double>>();
    node.value = n.at("v").get<double>();
    node.samples = n.at("n").get<int>();
    t.nodes.push_back(std::move(node));
  }
  t.regression = j.at("regression").get<bool>();
  t.n_classes = j.at("n_classes").get<int>();
  return t;
}

json tree_config_to_json(const trees::TreeConfig& c) {
  json j{{"criterion", trees::criterion_name(c.criterion)},
         {"min_samples_split", c.min_samples_split},
         {"min_samples_leaf", c.min_samples_leaf},
         {"min_impurity_decrease", c.min_impurity_decrease}};
  if (c.max_depth) j["max_depth"] = *c.max_depth;
  if (c.max_leaf_nodes) j["max_leaf_nodes"] = *c.max_leaf_nodes;
  if (c.max_features) j["max_features"] = *c.max_features;
  return j;
}

trees::TreeConfig tree_config_from_json(const json& j) {
  trees::TreeConfig c;
  c.criterion = trees::criterion_from_name(j.at("criterion").get<std::string>());
  c.min_samples_split = j.at("min_samples_split").get<int>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  c.min_impurity_decrease = j.at("min_impurity_decrease").get<double>();
  if (j.contains("max_depth")) c.max_depth = j.at("max_depth").get<int>();
  if (j.contains("max_leaf_nodes"))
    c.max_leaf_nodes = j.at("max_leaf_nodes").get<int>();
  if (j.contains("max_features"))
    c.max_features = j.at("max_features").get<int>();
  return c;
}

json tree_pack_to_json(const TreePack& t) {
  json j{{"tree", tree_to_json(t.tree)}};
  if (t.classes) j["classes"] = labels_to_json(*t.classes);
  return j;
}

TreePack tree_pack_from_json(const json& j) {
  TreePack t;
  t.tree = tree_from_json(j.at("tree"));
  if (j.contains("classes")) t.classes = labels_from_json(j.at("classes"));
  return t;
}

json forest_pack_to_json(const ForestPack& f) {
  json ts = json::array();
  for (const auto& t : f.forest.trees) ts.push_back(tree_to_json(t));
  json j{{"trees", ts},
         {"regression", f.forest.regression},
         {"n_classes", f.forest.n_classes},
         {"n_trees", f.forest.config.n_trees},
         {"bootstrap", f.forest.config.bootstrap},
         {"voting",
          f.forest.config.voting == trees::Voting::hard ? "hard" : "soft"},
         {"extra", f.forest.config.extra},
         {"seed", f.forest.config.seed},
         {"tree_config", tree_config_to_json(f.forest.config.tree)}};
  if (f.forest.config.max_features)
    j["max_features"] = *f.forest.config.max_features;
  if (f.classes) j["classes"] = labels_to_json(*f.classes);
  return j;
}

ForestPack forest_pack_from_json(const json& j) {
  ForestPack f;
  for (const auto& t : j.at("trees"))
    f.forest.trees.push_back(tree_from_json(t));
  f.forest.regression = j.at("regression").get<bool>();
  f.forest.n_classes = j.at("n_classes").get<int>();
  f.forest.config.n_trees = j.at("n_trees").get<int>();
  f.forest.config.bootstrap = j.at("bootstrap").get<bool>();
  f.forest.config.voting = j.at("voting").get<std::string>() == "hard"
                               ? trees::Voting::hard
                               : trees::Voting::soft;
  f.forest.config.extra = j.at("extra").get<bool>();
  f.forest.config.seed = j.at("seed").get<std::uint64_t>();
  f.forest.config.tree = tree_config_from_json(j.at("tree_config"));
  if (j.contains("max_features"))
    f.forest.config.max_features = j.at("max_features").get<int>();
  if (j.contains("classes")) f.classes = labels_from_json(j.at("classes"));
  return f;
}

json kmeans_to_json(const clustering::KMeansModel& m) {
  return json{{"centroids", matrix_to_json(m.centroids)},
              {"assignments", m.assignments},
              {"inertia", m.inertia},
              {"iterations", m.iterations},
              {"best_restart", m.best_restart},
              {"k", m.k},
              {"seed", m.seed}};
}

clustering::KMeansModel kmeans_from_json(const json& j) {
  clustering::KMeansModel m;
  m.centroids = matrix_from_json(j.at("centroids"));
  m.assignments = j.at("assignments").get<std::vector<int>>();
  m.inertia = j.at("inertia").get<double>();
  m.iterations = j.at("iterations").get<int>();
  m.best_restart = j.at("best_restart").get<int>();
  m.k = j.at("k").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

json gmm_to_json(const clustering::GmmModel& m) {
  json covs = json::array();
  for (const auto& c : m.covariances) covs.push_back(matrix_to_json(c));
  return json{{"means", matrix_to_json(m.means)},
              {"covariances", covs},
              {"weights", m.weights},
              {"log_likelihood", m.log_likelihood},
              {"iterations", m.iterations},
              {"k", m.k},
              {"seed", m.seed}};
}

clustering::GmmModel gmm_from_json(const json& j) {
  clustering::GmmModel m;
  m.means = matrix_from_json(j.at("means"));
  for (const auto& c : j.at("covariances"))
    m.covariances.push_back(matrix_from_json(c));
  m.weights = j.at("weights").get<std::vector<double>>();
  m.log_likelihood = j.at("log_likelihood").get<double>();
  m.iterations = j.at("iterations").get<int>();
  m.k = j.at("k").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

json pca_to_json(const decomposition::PcaModel& m) {
  return json{{"means", m.means},
              {"components", matrix_to_json(m.components)},
              {"explained_variance", m.explained_variance},
              {"explained_variance_ratio", m.explained_variance_ratio},
              {"total_variance", m.total_variance}};
}

decomposition::PcaModel pca_from_json(const json& j) {
  decomposition::PcaModel m;
  m.means = j.at("means").get<std::vector<double>>();
  m.components = matrix_from_json(j.at("components"));
  m.explained_variance = j.at("explained_variance").get<std::vector<double>>();
  m.explained_variance_ratio =
      j.at("explained_variance_ratio").get<std::vector<double>>();
  m.total_variance = j.at("total_variance").get<double>();
  return m;
}

json lda_proj_to_json(const LdaProjPack& m) {
  return json{{"projection", matrix_to_json(m.projection.projection)},
              {"eigenvalues", m.projection.eigenvalues},
              {"classes", labels_to_json(m.classes)}};
}

LdaProjPack lda_proj_from_json(const json& j) {
  LdaProjPack m;
  m.projection.projection = matrix_from_json(j.at("projection"));
  m.projection.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  m.classes = labels_from_json(j.at("classes"));
  return m;
}

json kpca_to_json(const kernels::KernelPcaModel& m) {
  return json{{"train_x", matrix_to_json(m.train_x)},
              {"kernel", kernel_to_json(m.kernel)},
              {"alphas", matrix_to_json(m.alphas)},
              {"eigenvalues", m.eigenvalues},
              {"train_col_means", m.train_col_means},
              {"train_mean", m.train_mean},
              {"requested_components", m.requested_components},
              {"reduced", m.reduced}};
}

kernels::KernelPcaModel kpca_from_json(const json& j) {
  kernels::KernelPcaModel m;
  m.train_x = matrix_from_json(j.at("train_x"));
  m.kernel = kernel_from_json(j.at("kernel"));
  m.alphas = matrix_from_json(j.at("alphas"));
  m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  m.train_col_means = j.at("train_col_means").get<std::vector<double>>();
  m.train_mean = j.at("train_mean").get<double>();
  m.requested_components = j.at("requested_components").get<int>();
  m.reduced = j.at("reduced").get<bool>();
  return m;
}

struct PayloadWriter {
  json operator()(const KnnModel& m) const { return knn_to_json(m); }
  json operator()(const linear::LinearModel& m) const {
    return linear_to_json(m);
  }
  json operator()(const linear::LogisticModel& m) const {
    return logistic_to_json(m);
  }
  json operator()(const svm::SvmModel& m) const { return svm_to_json(m); }
  json operator()(const kernels::KernelRidgeModel& m) const {
    return krr_to_json(m);
  }
  json operator()(const multiclass::MultinomialModel& m) const {
    return multinomial_to_json(m);
  }
  json operator()(const multiclass::OvrModel& m) const {
    return ovr_to_json(m);
  }
  json operator()(const multiclass::OvoModel& m) const {
    return ovo_to_json(m);
  }
  json operator()(const multiclass::EcocModel& m) const {
    return ecoc_to_json(m);
  }
  json operator()(const gaussian::GaussianClassifier& m) const {
    return gaussian_to_json(m);
  }
  json operator()(const TreePack& m) const { return tree_pack_to_json(m); }
  json operator()(const ForestPack& m) const { return forest_pack_to_json(m); }
  json operator()(const clustering::KMeansModel& m) const {
    return kmeans_to_json(m);
  }
  json operator()(const clustering::GmmModel& m) const {
    return gmm_to_json(m);
  }
  json operator()(const decomposition::PcaModel& m) const {
    return pca_to_json(m);
  }
  json operator()(const LdaProjPack& m) const { return lda_proj_to_json(m); }
  json operator()(const kernels::KernelPcaModel& m) const {
    return kpca_to_json(m);
  }
};

Payload payload_from_json(const std::string& kind, const json& j) {
  if (kind == "knn") return knn_from_json(j);
  if (kind == "ols" || kind == "ridge" || kind == "lasso" ||
      kind == "elasticnet") {
    return linear_from_json(j);
  }
  if (kind == "logistic") return logistic_from_json(j);
  if (kind == "svc" || kind == "svr") return svm_from_json(j);
  if (kind == "krr") return krr_from_json(j);
  if (kind == "multinomial") return multinomial_from_json(j);
  if (kind == "ovr") return ovr_from_json(j);
  if (kind == "ovo") return ovo_from_json(j);
  if (kind == "ecoc") return ecoc_from_json(j);
  if (kind == "gnb" || kind == "lda" || kind == "qda")
    return gaussian_from_json(j);
  if (kind == "tree") return tree_pack_from_json(j);
  if (kind == "forest" || kind == "extratrees")
    return forest_pack_from_json(j);
  if (kind == "kmeans") return kmeans_from_json(j);
  if (kind == "gmm") return gmm_from_json(j);
  if (kind == "pca") return pca_from_json(j);
  if (kind == "lda-proj") return lda_proj_from_json(j);
  if (kind == "kpca") return kpca_from_json(j);
  throw Error(ErrorCode::parse, "unknown model kind: " + kind);
}

}  // namespace

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
  if (x.cols() != s.means.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from standardizer");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      out(i, j) = (x(i, j) - s.means[j]) / s.stds[j];
  return out;
}

Matrix select_features(const FittedModel& model, const csv::RawTable& table,
                       std::optional<std::size_t> skip_column) {
  bool all_found = !model.feature_names.empty();
  std::vector<std::size_t> pick;
  for (const auto& name : model.feature_names) {
    const auto idx = table.find_column(name);
    if (!idx || (skip_column && *skip_column == *idx)) {
      all_found = false;
      break;
    }
    pick.push_back(*idx);
  }
  if (!all_found) {
    pick.clear();
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (skip_column && *skip_column == j) continue;
      pick.push_back(j);
    }
    if (pick.size() != model.feature_count) {
      throw Error(ErrorCode::dimension_mismatch,
                  "input columns do not match the model's features");
    }
  }
  return csv::parse_columns(table, pick);
}

void save_model(const FittedModel& model, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["model_kind"] = model.kind;
  j["seed"] = model.seed;
  j["feature_count"] = model.feature_count;
  j["feature_names"] = model.feature_names;
  if (model.standardizer) {
    j["standardizer"] = json{{"means", model.standardizer->means},
                             {"stds", model.standardizer->stds}};
  }
  j["parameters"] = std::visit(PayloadWriter{}, model.payload);
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::parse, "cannot write " + path);
  }
  out << j.dump(1) << '\n';
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::parse, "cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse,
                path + ": not a valid model file (" + e.what() + ")");
  }
  if (!j.contains("format_version") ||
      j.at("format_version").get<int>() != kFormatVersion) {
    throw Error(ErrorCode::parse,
                path + ": unsupported model file format version");
  }
  FittedModel model;
  model.kind = j.at("model_kind").get<std::string>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.feature_count = j.at("feature_count").get<std::size_t>();
  model.feature_names =
      j.at("feature_names").get<std::vector<std::string>>();
  if (j.contains("standardizer")) {
    Standardizer s;
    s.means = j.at("standardizer").at("means").get<std::vector<double>>();
    s.stds = j.at("standardizer").at("stds").get<std::vector<double>>();
    model.standardizer = std::move(s);
  }
  model.payload = payload_from_json(model.kind, j.at("parameters"));
  return model;
}

bool is_classifier_kind(const std::string& kind) {
  return kind == "knn" || kind == "logistic" || kind == "svc" ||
         kind == "multinomial" || kind == "ovr" || kind == "ovo" ||
         kind == "ecoc" || kind == "gnb" || kind == "lda" || kind == "qda" ||
         kind == "tree" || kind == "forest" || kind == "extratrees";
}

bool is_regressor_kind(const std::string& kind) {
  return kind == "knn" || kind == "ols" || kind == "ridge" ||
         kind == "lasso" || kind == "elasticnet" || kind == "svr" ||
         kind == "krr" || kind == "tree" || kind == "forest" ||
         kind == "extratrees";
}

bool is_transform_kind(const std::string& kind) {
  return kind == "pca" || kind == "lda-proj" || kind == "kpca";
}

bool is_cluster_kind(const std::string& kind) {
  return kind == "kmeans" || kind == "gmm";
}

namespace {

std::vector<std::string> decode_classes(const Labels& classes,
                                        const std::vector<int>& preds) {
  std::vector<std::string> out;
  out.reserve(preds.size());
  for (int p : preds) out.push_back(classes.decode(p));
  return out;
}

void set_numeric(Prediction& pred, std::vector<double> values) {
  pred.values.reserve(values.size());
  for (double v : values) pred.values.push_back(csv::format_value(v));
  pred.numeric = std::move(values);
}

void fill_proba_columns(Prediction& pred, const Labels& classes) {
  for (const auto& name : classes.names)
    pred.proba_columns.push_back("proba_" + name);
}

}  // namespace

Prediction predict_with_model(const FittedModel& model, const Matrix& raw,
                              bool want_proba) {
  if (raw.cols() != model.feature_count) {
    throw Error(ErrorCode::dimension_mismatch,
                "input has " + std::to_string(raw.cols()) +
                    " features, model expects " +
                    std::to_string(model.feature_count));
  }
  const Matrix x = model.standardizer
                       ? apply_standardizer(*model.standardizer, raw)
                       : raw;
  Prediction pred;

  if (const auto* knn = std::get_if<KnnModel>(&model.payload)) {
    const auto index =
        neighbors::NeighborIndex::build(knn->train_x, knn->index_kind,
                                        knn->leaf_size);
    if (knn->labels) {
      std::vector<int> classes(x.rows());
      Matrix proba(x.rows(), knn->labels->num_classes());
      for (std::size_t i = 0; i < x.rows(); ++i) {
        auto [cls, scores] =
            knn->radius
                ? neighbors::radius_predict_classification(
                      index, *knn->labels, x.row(i), *knn->radius, knn->scheme)
                : neighbors::knn_predict_classification(
                      index, *knn->labels, x.row(i), knn->k, knn->scheme);
        classes[i] = cls;
        for (std::size_t c = 0; c < scores.size(); ++c) proba(i, c) = scores[c];
      }
      pred.values = decode_classes(*knn->labels, classes);
      if (want_proba) {
        pred.proba = std::move(proba);
        fill_proba_columns(pred, *knn->labels);
      }
    } else {
      std::vector<double> out(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) {
        out[i] = knn->radius
                     ? neighbors::radius_predict_regression(
                           index, *knn->targets, x.row(i), *knn->radius,
                           knn->scheme)
                     : neighbors::knn_predict_regression(
                           index, *knn->targets, x.row(i), knn->k,
                           knn->scheme);
      }
      set_numeric(pred, std::move(out));
      if (want_proba) {
        throw Error(ErrorCode::config,
                    "probabilities are not defined for regression");
      }
    }
    return pred;
  }

  if (const auto* lin = std::get_if<linear::LinearModel>(&model.payload)) {
    if (want_proba) {
      throw Error(ErrorCode::config,
                  "probabilities are not defined for regression");
    }
    set_numeric(pred, linear::predict(*lin, x));
    return pred;
  }

  if (const auto* logit = std::get_if<linear::LogisticModel>(&model.payload)) {
    pred.values = decode_classes(logit->classes, linear::predict(*logit, x));
    if (want_proba) {
      pred.proba = linear::predict_proba(*logit, x);
      fill_proba_columns(pred, logit->classes);
    }
    return pred;
  }

  if (const auto* sv = std::get_if<svm::SvmModel>(&model.payload)) {
    if (sv->regression) {
      if (want_proba) {
        throw Error(ErrorCode::config,
                    "probabilities are not defined for regression");
      }
      set_numeric(pred, svm::svm_decision(*sv, x));
    } else {
      if (want_proba) {
        throw Error(ErrorCode::config,
                    "the SVM classifier does not produce probabilities");
      }
      pred.values = decode_classes(sv->classes, svm::svm_predict(*sv, x));
    }
    return pred;
  }

  if (const auto* krr =
          std::get_if<kernels::KernelRidgeModel>(&model.payload)) {
    if (want_proba) {
      throw Error(ErrorCode::config,
                  "probabilities are not defined for regression");
    }
    set_numeric(pred, kernels::krr_predict(*krr, x));
    return pred;
  }

  if (const auto* mn =
          std::get_if<multiclass::MultinomialModel>(&model.payload)) {
    pred.values =
        decode_classes(mn->classes, multiclass::multinomial_predict(*mn, x));
    if (want_proba) {
      pred.proba = multiclass::multinomial_proba(*mn, x);
      fill_proba_columns(pred, mn->classes);
    }
    return pred;
  }

  if (const auto* ovr = std::get_if<multiclass::OvrModel>(&model.payload)) {
    if (want_proba) {
      throw Error(ErrorCode::config,
                  "one-vs-rest reports decision scores, not probabilities");
    }
    pred.values =
        decode_classes(ovr->classes, multiclass::ovr_predict(*ovr, x));
    return pred;
  }

  if (const auto* ovo = std::get_if<multiclass::OvoModel>(&model.payload)) {
    if (want_proba) {
      throw Error(ErrorCode::config,
                  "one-vs-one reports votes, not probabilities");
    }
    pred.values =
        decode_classes(ovo->classes, multiclass::ovo_predict(*ovo, x));
    return pred;
  }

  if (const auto* ecoc = std::get_if<multiclass::EcocModel>(&model.payload)) {
    if (want_proba) {
      throw Error(ErrorCode::config,
                  "ECOC reports code distances, not probabilities");
    }
    pred.values =
        decode_classes(ecoc->classes, multiclass::ecoc_predict(*ecoc, x));
    return pred;
  }

  if (const auto* g =
          std::get_if<gaussian::GaussianClassifier>(&model.payload)) {
    pred.values = decode_classes(g->classes, gaussian::predict(*g, x));
    if (want_proba) {
      pred.proba = gaussian::predict_proba(*g, x);
      fill_proba_columns(pred, g->classes);
    }
    return pred;
  }

  if (const auto* t = std::get_if<TreePack>(&model.payload)) {
    if (t->tree.regression) {
      if (want_proba) {
        throw Error(ErrorCode::config,
                    "probabilities are not defined for regression");
      }
      set_numeric(pred, trees::predict_values(t->tree, x));
    } else {
      pred.values =
          decode_classes(*t->classes, trees::predict_classes(t->tree, x));
      if (want_proba) {
        pred.proba = trees::predict_proba(t->tree, x);
        fill_proba_columns(pred, *t->classes);
      }
    }
    return pred;
  }

  if (const auto* f = std::get_if<ForestPack>(&model.payload)) {
    if (f->forest.regression) {
      if (want_proba) {
        throw Error(ErrorCode::config,
                    "probabilities are not defined for regression");
      }
      set_numeric(pred, trees::forest_predict_values(f->forest, x));
    } else {
      pred.values = decode_classes(
          *f->classes, trees::forest_predict_classes(f->forest, x));
      if (want_proba) {
        pred.proba = trees::forest_predict_proba(f->forest, x);
        fill_proba_columns(pred, *f->classes);
      }
    }
    return pred;
  }

  if (const auto* km = std::get_if<clustering::KMeansModel>(&model.payload)) {
    pred.column = "cluster";
    auto [assignments, inertia] = clustering::assign_clusters(x, km->centroids);
    (void)inertia;
    pred.values.reserve(assignments.size());
    for (int a : assignments) pred.values.push_back(std::to_string(a));
    if (want_proba) {
      throw Error(ErrorCode::config,
                  "k-means assigns clusters, not probabilities");
    }
    return pred;
  }

  if (const auto* gmm = std::get_if<clustering::GmmModel>(&model.payload)) {
    pred.column = "cluster";
    const auto preds = clustering::gmm_predict(*gmm, x);
    pred.values.reserve(preds.size());
    for (int a : preds) pred.values.push_back(std::to_string(a));
    if (want_proba) {
      pred.proba = clustering::gmm_responsibilities(*gmm, x);
      for (int j = 0; j < gmm->k; ++j)
        pred.proba_columns.push_back("proba_component_" + std::to_string(j));
    }
    return pred;
  }

  throw Error(ErrorCode::config,
              "model kind '" + model.kind + "' does not support predict; "
              "use the transform command");
}

Matrix transform_with_model(const FittedModel& model, const Matrix& raw) {
  if (raw.cols() != model.feature_count) {
    throw Error(ErrorCode::dimension_mismatch,
                "input has " + std::to_string(raw.cols()) +
                    " features, model expects " +
                    std::to_string(model.feature_count));
  }
  const Matrix x = model.standardizer
                       ? apply_standardizer(*model.standardizer, raw)
                       : raw;
  if (const auto* pca = std::get_if<decomposition::PcaModel>(&model.payload)) {
    return decomposition::pca_transform(*pca, x);
  }
  if (const auto* lda = std::get_if<LdaProjPack>(&model.payload)) {
    return decomposition::lda_project(lda->projection, x);
  }
  if (const auto* kpca =
          std::get_if<kernels::KernelPcaModel>(&model.payload)) {
    return kernels::kernel_pca_transform(*kpca, x);
  }
  throw Error(ErrorCode::config,
              "model kind '" + model.kind + "' is not a transform");
}

std::vector<std::pair<std::string, double>> evaluate_with_model(
    const FittedModel& model, const Matrix& raw_features,
    const std::vector<std::string>& label_values) {
  std::vector<std::pair<std::string, double>> metrics;

  if (is_cluster_kind(model.kind)) {
    const Matrix x = model.standardizer
                         ? apply_standardizer(*model.standardizer, raw_features)
                         : raw_features;
    if (const auto* km =
            std::get_if<clustering::KMeansModel>(&model.payload)) {
      auto [assignments, inertia] = clustering::assign_clusters(x, km->centroids);
      (void)assignments;
      metrics.emplace_back("inertia", inertia);
    } else {
      const auto* gmm = std::get_if<clustering::GmmModel>(&model.payload);
      metrics.emplace_back("log_likelihood",
                           clustering::gmm_log_likelihood(*gmm, x));
    }
    return metrics;
  }

  if (is_transform_kind(model.kind)) {
    throw Error(ErrorCode::config,
                "model kind '" + model.kind + "' has no evaluation metric");
  }

  if (label_values.empty()) {
    throw Error(ErrorCode::config, "evaluation requires a label column");
  }

  const Prediction pred = predict_with_model(model, raw_features, false);
  if (pred.numeric) {
    double mse = 0.0, mae = 0.0;
    for (std::size_t i = 0; i < label_values.size(); ++i) {
      const char* begin = label_values[i].c_str();
      char* end = nullptr;
      const double target = std::strtod(begin, &end);
      if (end == begin || *end != '\0' || !std::isfinite(target)) {
        throw Error(ErrorCode::parse,
                    "target '" + label_values[i] + "' is not a finite number");
      }
      const double err = target - (*pred.numeric)[i];
      mse += err * err;
      mae += std::abs(err);
    }
    const double n = static_cast<double>(label_values.size());
    metrics.emplace_back("mse", mse / n);
    metrics.emplace_back("mae", mae / n);
  } else {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      if (pred.values[i] == label_values[i]) ++correct;
    }
    metrics.emplace_back(
        "accuracy",
        static_cast<double>(correct) / static_cast<double>(pred.values.size()));
  }
  return metrics;
}

}  // namespace model_io
}  // namespace classicml
