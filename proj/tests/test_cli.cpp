#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "classicml/csv.hpp"

using namespace classicml;

namespace {

std::string g_cli;
std::string g_data_dir;
std::filesystem::path g_work;

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::string wfile(const std::string& name) { return (g_work / name).string(); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("csv loader") {
  const std::string good = wfile("good.csv");
  write_file(good, "a,b,y\n1,2,yes\n3,4,no\n0.5,-1,yes\n");
  const auto table = csv::load_csv(good, std::string("y"));
  CHECK(table.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(table.features.rows() == 3);
  CHECK(table.features.cols() == 2);
  CHECK(table.label_values == std::vector<std::string>{"yes", "no", "yes"});

  const std::string numeric = wfile("numeric.csv");
  write_file(numeric, "a,b,c\n1,2,3\n4,5,6\n");
  const auto unsupervised = csv::load_csv(numeric, std::nullopt);
  CHECK(unsupervised.features.cols() == 3);
  CHECK(unsupervised.label_values.empty());

  const std::string nan_file = wfile("nan.csv");
  write_file(nan_file, "a,y\nNaN,1\n");
  CHECK_THROWS_AS(csv::load_csv(nan_file, std::string("y")), Error);

  const std::string ragged = wfile("ragged.csv");
  write_file(ragged, "a,b\n1,2\n3\n");
  try {
    csv::load_csv(ragged, std::nullopt);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const std::string text_cell = wfile("text.csv");
  write_file(text_cell, "a,b\n1,2\n3,oops\n");
  try {
    csv::load_csv(text_cell, std::nullopt);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column b") != std::string::npos);
  }

  CHECK_THROWS_AS(csv::load_csv(good, std::string("missing")), Error);
}

TEST_CASE("fit is deterministic and byte-identical across runs") {
  const std::string train = wfile("blobs.csv");
  {
    std::ostringstream csv_text;
    csv_text << "x0,x1,label\n";
    // Small deterministic three-class layout.
    for (int i = 0; i < 12; ++i) {
      const int c = i % 3;
      const double cx = c == 0 ? 0.0 : (c == 1 ? 10.0 : 0.0);
      const double cy = c == 2 ? 10.0 : 0.0;
      csv_text << cx + 0.1 * i << "," << cy - 0.05 * i << ","
               << static_cast<char>('a' + c) << "\n";
    }
    write_file(train, csv_text.str());
  }
  const std::string m1 = wfile("forest1.model");
  const std::string m2 = wfile("forest2.model");
  const std::string flags = " --in " + train +
                            " --label label --trees 5 --seed 42 --out ";
  CHECK(run("fit --model forest" + flags + m1) == 0);
  CHECK(run("fit --model forest" + flags + m2) == 0);
  const auto c1 = slurp(m1);
  CHECK(!c1.empty());
  CHECK(c1 == slurp(m2));
}

TEST_CASE("kmeans fit stores the documented inertia") {
  const std::string pts = wfile("pairs.csv");
  write_file(pts, "x\n0\n1\n10\n11\n");
  const std::string model = wfile("kmeans.model");
  CHECK(run("fit --model kmeans --k 2 --in " + pts + " --out " + model) == 0);
  const auto content = slurp(model);
  CHECK(content.find("\"inertia\": 1.0") != std::string::npos);

  // evaluate on the training file reports the same inertia.
  const std::string metrics = wfile("kmeans_metrics.txt");
  const int code = std::system(
      (g_cli + " evaluate --model-file " + model + " --in " + pts + " > " +
       metrics + " 2>/dev/null")
          .c_str());
  CHECK(WEXITSTATUS(code) == 0);
  CHECK(slurp(metrics) == "inertia=1.000000\n");
}

TEST_CASE("an unrestricted tree reproduces its training labels") {
  const std::string train = wfile("tree_train.csv");
  write_file(train,
             "f0,f1,species\n1,2,one\n2,1,two\n3,3,three\n4,1,one\n"
             "5,4,two\n6,2,three\n7,7,one\n8,3,two\n");
  const std::string model = wfile("tree.model");
  const std::string preds = wfile("tree_preds.csv");
  CHECK(run("fit --model tree --in " + train + " --label species --out " +
            model) == 0);
  CHECK(run("predict --model-file " + model + " --in " + train + " --out " +
            preds) == 0);
  CHECK(slurp(preds) ==
        "prediction\none\ntwo\nthree\none\ntwo\nthree\none\ntwo\n");

  const std::string metrics = wfile("tree_metrics.txt");
  std::system((g_cli + " evaluate --model-file " + model + " --in " + train +
               " --label species > " + metrics + " 2>/dev/null")
                  .c_str());
  CHECK(slurp(metrics) == "accuracy=1.000000\n");
}

TEST_CASE("probability columns sum to one") {
  const std::string train = wfile("proba_train.csv");
  std::ostringstream csv_text;
  csv_text << "x,y,label\n";
  for (int i = 0; i < 10; ++i) {
    csv_text << i << "," << (i % 2) << "," << (i < 5 ? "lo" : "hi") << "\n";
  }
  write_file(train, csv_text.str());
  const std::string model = wfile("gnb.model");
  const std::string preds = wfile("gnb_preds.csv");
  CHECK(run("fit --model gnb --in " + train + " --label label --out " +
            model) == 0);
  CHECK(run("predict --model-file " + model + " --in " + train + " --out " +
            preds + " --proba") == 0);

  std::ifstream in(preds);
  std::string header;
  std::getline(in, header);
  CHECK(header == "prediction,proba_lo,proba_hi");
  std::string line;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double p1 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double p2 = std::stod(line.substr(c2 + 1));
    CHECK(std::abs(p1 + p2 - 1.0) <= 1e-9);
  }
}

TEST_CASE("exit codes follow the contract") {
  const std::string train = wfile("three.csv");
  write_file(train, "x,label\n1,a\n2,b\n3,c\n4,a\n5,b\n6,c\n");
  const std::string model = wfile("unused.model");

  // svc on three classes is a configuration error pointing at the
  // multiclass strategies.
  CHECK(run("fit --model svc --in " + train + " --label label --out " +
            model) == 2);

  // Unknown model kind.
  CHECK(run("fit --model nonsense --in " + train + " --label label --out " +
            model) == 2);

  // Missing label column in the file.
  CHECK(run("fit --model tree --in " + train + " --label absent --out " +
            model) == 2);

  // Parse failure is a data error.
  const std::string bad = wfile("bad_cell.csv");
  write_file(bad, "x,label\noops,a\n1,b\n");
  CHECK(run("fit --model tree --in " + bad + " --label label --out " +
            model) == 3);

  // Feature mismatch at predict time is a data error.
  const std::string ok_model = wfile("ok.model");
  CHECK(run("fit --model tree --in " + train + " --label label --out " +
            ok_model) == 0);
  const std::string wrong = wfile("wrong_features.csv");
  write_file(wrong, "p,q\n1,2\n");
  const std::string preds = wfile("wrong_preds.csv");
  CHECK(run("predict --model-file " + ok_model + " --in " + wrong +
            " --out " + preds) == 3);

  // transform requires a transform-capable model.
  CHECK(run("transform --model-file " + ok_model + " --in " + train +
            " --out " + preds) == 2);
}

TEST_CASE("pca transform round-trips through the cli") {
  const std::string train = wfile("pca_train.csv");
  std::ostringstream csv_text;
  csv_text << "a,b,c\n";
  for (int i = 0; i < 15; ++i) {
    csv_text << 0.1 * i << "," << 0.2 * i + 0.01 * (i % 3) << ","
             << 3.0 - 0.05 * i << "\n";
  }
  write_file(train, csv_text.str());
  const std::string model = wfile("pca.model");
  const std::string proj = wfile("pca_proj.csv");
  CHECK(run("fit --model pca --components 3 --in " + train + " --out " +
            model) == 0);
  CHECK(run("transform --model-file " + model + " --in " + train + " --out " +
            proj) == 0);
  const auto table = csv::load_csv(proj, std::nullopt);
  CHECK(table.feature_names ==
        std::vector<std::string>{"comp_1", "comp_2", "comp_3"});
  CHECK(table.features.rows() == 15);
}

TEST_CASE("standardize flag is honored end to end") {
  const std::string train = wfile("scale_train.csv");
  std::ostringstream csv_text;
  csv_text << "big,small,y\n";
  for (int i = 0; i < 10; ++i) {
    csv_text << 1000.0 * i << "," << 0.001 * i << "," << 2.0 * i << "\n";
  }
  write_file(train, csv_text.str());
  const std::string model = wfile("ridge_std.model");
  CHECK(run("fit --model ridge --lambda 1 --standardize --in " + train +
            " --label y --out " + model) == 0);
  CHECK(slurp(model).find("standardizer") != std::string::npos);
  const std::string preds = wfile("ridge_std_preds.csv");
  CHECK(run("predict --model-file " + model + " --in " + train + " --out " +
            preds) == 0);
}


TEST_CASE("constant regressor evaluates to the biased variance") {
  // A depth-zero regression tree predicts the training mean, so its mse on
  // the training file is the biased variance of y.
  const std::string train = wfile("var_train.csv");
  std::ostringstream csv_text;
  csv_text << "x,y\n";
  const double ys[6] = {1.0, 2.0, 3.0, 4.0, 5.0, 9.0};
  double mean = 0.0;
  for (int i = 0; i < 6; ++i) {
    csv_text << i << "," << ys[i] << "\n";
    mean += ys[i] / 6.0;
  }
  double variance = 0.0;
  for (double y : ys) variance += (y - mean) * (y - mean) / 6.0;
  write_file(train, csv_text.str());

  const std::string model = wfile("stump.model");
  CHECK(run("fit --model tree --task regress --max-depth 0 --in " + train +
            " --label y --out " + model) == 0);
  const std::string metrics = wfile("stump_metrics.txt");
  std::system((g_cli + " evaluate --model-file " + model + " --in " + train +
               " --label y > " + metrics + " 2>/dev/null")
                  .c_str());
  char expected[64];
  std::snprintf(expected, sizeof(expected), "mse=%.6f\n", variance);
  const std::string got = slurp(metrics);
  CHECK(got.find(expected) != std::string::npos);
}

TEST_CASE("rings become separable through the kpca transform pipeline") {
  const std::string rings = wfile("rings.csv");
  {
    std::ostringstream csv_text;
    csv_text << "x,y,ring\n";
    for (int i = 0; i < 40; ++i) {
      const double t = 2.0 * 3.14159265358979 * i / 40.0;
      csv_text << 0.5 * std::cos(t) << "," << 0.5 * std::sin(t) << ",inner\n";
    }
    for (int i = 0; i < 40; ++i) {
      const double t = 2.0 * 3.14159265358979 * i / 40.0;
      csv_text << 2.0 * std::cos(t + 0.03) << "," << 2.0 * std::sin(t + 0.03)
               << ",outer\n";
    }
    write_file(rings, csv_text.str());
  }
  const std::string kpca = wfile("rings_kpca.model");
  CHECK(run("fit --model kpca --kernel rbf --gamma 1 --components 2 "
            "--label ring --in " + rings + " --out " + kpca) == 0);
  const std::string projected = wfile("rings_proj.csv");
  CHECK(run("transform --model-file " + kpca + " --in " + rings + " --out " +
            projected) == 0);

  // Stitch the ring labels onto the projected coordinates and fit logistic.
  const auto proj = csv::load_csv(projected, std::nullopt);
  const auto raw = csv::read_raw(rings);
  const std::string labeled = wfile("rings_labeled.csv");
  {
    std::ofstream out(labeled);
    out << "comp_1,comp_2,ring\n";
    for (std::size_t i = 0; i < proj.features.rows(); ++i) {
      out << proj.features(i, 0) << "," << proj.features(i, 1) << ","
          << raw.rows[i][2] << "\n";
    }
  }
  const std::string logit = wfile("rings_logit.model");
  CHECK(run("fit --model logistic --penalty l2 --lambda 0.0001 --label ring "
            "--in " + labeled + " --out " + logit) == 0);
  const std::string metrics = wfile("rings_metrics.txt");
  std::system((g_cli + " evaluate --model-file " + logit + " --in " + labeled +
               " --label ring > " + metrics + " 2>/dev/null")
                  .c_str());
  CHECK(slurp(metrics) == "accuracy=1.000000\n");
}

TEST_CASE("knn regression through the cli") {
  const std::string train = wfile("knn_reg.csv");
  write_file(train, "x,y\n0,0\n1,2\n2,4\n3,6\n4,8\n");
  const std::string model = wfile("knn_reg.model");
  const std::string preds = wfile("knn_reg_preds.csv");
  CHECK(run("fit --model knn --task regress --k 1 --in " + train +
            " --label y --out " + model) == 0);
  CHECK(run("predict --model-file " + model + " --in " + train + " --out " +
            preds) == 0);
  CHECK(slurp(preds) == "prediction\n0\n2\n4\n6\n8\n");
}

int main(int argc, char** argv) {
  doctest::Context context;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (g_cli.empty() && arg.rfind("-", 0) != 0) {
      g_cli = arg;
    } else if (g_data_dir.empty() && arg.rfind("-", 0) != 0) {
      g_data_dir = arg;
    }
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli> <data-dir>\n");
    return 1;
  }
  g_work = std::filesystem::temp_directory_path() / "classicml_cli_test";
  std::filesystem::create_directories(g_work);
  context.applyCommandLine(1, argv);
  return context.run();
}
