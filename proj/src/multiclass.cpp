#include "classicml/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "classicml/linalg.hpp"
#include "classicml/parallel.hpp"
#include "classicml/rng.hpp"

namespace classicml {
namespace multiclass {

std::vector<double> softmax(std::span<const double> scores) {
  check_finite(scores, "softmax scores");
  double m = scores[0];
  for (double s : scores) m = std::max(m, s);
  std::vector<double> out(scores.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - m);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

namespace {

Matrix scores_matrix(const Matrix& x, const Matrix& weights) {
  const std::size_t q = weights.rows();
  Matrix scores(x.rows(), q);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t k = 0; k < q; ++k) {
      double s = weights(k, 0);
      for (std::size_t j = 0; j < row.size(); ++j)
        s += weights(k, j + 1) * row[j];
      scores(i, k) = s;
    }
  }
  return scores;
}

}  // namespace

double multinomial_objective(const Matrix& x, const Labels& labels,
                             const Matrix& weights, double lambda) {
  const Matrix scores = scores_matrix(x, weights);
  const std::size_t q = weights.rows();
  double obj = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double m = scores(i, 0);
    for (std::size_t k = 1; k < q; ++k) m = std::max(m, scores(i, k));
    double lse = 0.0;
    for (std::size_t k = 0; k < q; ++k) lse += std::exp(scores(i, k) - m);
    obj += m + std::log(lse) - scores(i, labels.values[i]);
  }
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t j = 1; j < weights.cols(); ++j)
      obj += lambda * weights(k, j) * weights(k, j);
  return obj;
}

Matrix multinomial_gradient(const Matrix& x, const Labels& labels,
                            const Matrix& weights, double lambda) {
  const Matrix scores = scores_matrix(x, weights);
  const std::size_t q = weights.rows();
  Matrix grad(q, weights.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto probs = softmax(scores.row(i));
    const auto row = x.row(i);
    for (std::size_t k = 0; k < q; ++k) {
      const double delta =
          probs[k] - (labels.values[i] == static_cast<int>(k) ? 1.0 : 0.0);
      grad(k, 0) += delta;
      for (std::size_t j = 0; j < row.size(); ++j)
        grad(k, j + 1) += delta * row[j];
    }
  }
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t j = 1; j < weights.cols(); ++j)
      grad(k, j) += 2.0 * lambda * weights(k, j);
  return grad;
}

MultinomialModel fit_multinomial(const Matrix& x, const Labels& labels,
                                 double lambda_l2) {
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::dimension_mismatch, "X and label counts differ");
  }
  if (labels.num_classes() < 2) {
    throw Error(ErrorCode::degenerate_labels,
                "multinomial regression needs at least two classes");
  }
  if (lambda_l2 < 0.0) {
    throw Error(ErrorCode::invalid_hyperparameter, "lambda must be >= 0");
  }
  check_finite(x, "X");

  const std::size_t q = labels.names.size();
  Matrix w(q, x.cols() + 1);

  constexpr int kMaxIters = 10000;
  constexpr double kTol = 1e-6;
  int iter = 0;
  for (; iter < kMaxIters; ++iter) {
    const Matrix g = multinomial_gradient(x, labels, w, lambda_l2);
    double gmax = 0.0, gsq = 0.0;
    for (double v : g.data()) {
      gmax = std::max(gmax, std::abs(v));
      gsq += v * v;
    }
    if (gmax <= kTol) break;

    const double here = multinomial_objective(x, labels, w, lambda_l2);
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-20) {
      Matrix cand = w;
      for (std::size_t idx = 0; idx < cand.data().size(); ++idx)
        cand.data()[idx] -= step * g.data()[idx];
      if (multinomial_objective(x, labels, cand, lambda_l2) <=
          here - 1e-4 * step * gsq) {
        w = std::move(cand);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (iter == kMaxIters) {
    throw ConvergenceError("multinomial regression did not converge",
                           std::vector<double>(w.data()));
  }

  MultinomialModel model;
  model.weights = std::move(w);
  model.classes = labels;
  model.lambda = lambda_l2;
  model.iterations = iter;
  return model;
}

Matrix multinomial_scores(const MultinomialModel& model, const Matrix& x) {
  if (x.cols() + 1 != model.weights.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  return scores_matrix(x, model.weights);
}

Matrix multinomial_proba(const MultinomialModel& model, const Matrix& x) {
  Matrix scores = multinomial_scores(model, x);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto probs = softmax(scores.row(i));
    for (std::size_t k = 0; k < probs.size(); ++k) scores(i, k) = probs[k];
  }
  return scores;
}

std::vector<int> multinomial_predict(const MultinomialModel& model,
                                     const Matrix& x) {
  const Matrix scores = multinomial_scores(model, x);
  std::vector<int> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, out[i])) out[i] = static_cast<int>(k);
  }
  return out;
}

std::vector<double> BinaryBaseModel::decision(const Matrix& x) const {
  if (std::holds_alternative<linear::LogisticModel>(model)) {
    return linear::decision_function(std::get<linear::LogisticModel>(model), x);
  }
  return svm::svm_decision(std::get<svm::SvmModel>(model), x);
}

BinaryBaseModel fit_binary_base(const BinaryBaseSpec& spec, const Matrix& x,
                                const Labels& binary) {
  BinaryBaseModel out;
  if (spec.kind == BinaryBaseSpec::Kind::logistic) {
    out.model =
        linear::fit_logistic(x, binary, spec.penalty, spec.lambda, spec.alpha);
  } else {
    out.model = svm::fit_svc(x, binary, spec.kernel, spec.c, spec.iterations);
  }
  return out;
}

namespace {

Labels binary_labels(std::vector<int> zero_one) {
  Labels l;
  l.values = std::move(zero_one);
  l.names = {"neg", "pos"};
  return l;
}

// Runs independent base fits, possibly in parallel; results land at their
// task index so the outcome is schedule-independent. The lowest-index
// failure is reported, tagged with the task name.
void run_tasks(std::size_t count,
               const std::function<BinaryBaseModel(std::size_t)>& fit_task,
               const std::function<std::string(std::size_t)>& task_name,
               std::vector<BinaryBaseModel>& out) {
  out.resize(count);
  std::vector<std::optional<std::pair<ErrorCode, std::string>>> errors(count);
  parallel_for(count, [&](std::size_t t) {
    try {
      out[t] = fit_task(t);
    } catch (const Error& e) {
      errors[t] = {e.code(), e.what()};
    } catch (const std::exception& e) {
      errors[t] = {ErrorCode::convergence_failure, e.what()};
    }
  });
  for (std::size_t t = 0; t < count; ++t) {
    if (errors[t]) {
      throw Error(errors[t]->first,
                  task_name(t) + ": " + errors[t]->second);
    }
  }
}

}  // namespace

OvrModel ovr_fit(const Matrix& x, const Labels& labels,
                 const BinaryBaseSpec& base) {
  if (labels.num_classes() < 2) {
    throw Error(ErrorCode::degenerate_labels,
                "one-vs-rest needs at least two classes");
  }
  const std::size_t q = labels.names.size();
  OvrModel model;
  model.base = base;
  model.classes = labels;
  run_tasks(
      q,
      [&](std::size_t k) {
        std::vector<int> ys(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
          ys[i] = labels.values[i] == static_cast<int>(k) ? 1 : 0;
        return fit_binary_base(base, x, binary_labels(std::move(ys)));
      },
      [&](std::size_t k) { return "class " + labels.names[k]; },
      model.models);
  return model;
}

Matrix ovr_decision(const OvrModel& model, const Matrix& x) {
  Matrix scores(x.rows(), model.models.size());
  for (std::size_t k = 0; k < model.models.size(); ++k) {
    const auto s = model.models[k].decision(x);
    for (std::size_t i = 0; i < x.rows(); ++i) scores(i, k) = s[i];
  }
  return scores;
}

std::vector<int> ovr_predict(const OvrModel& model, const Matrix& x) {
  const Matrix scores = ovr_decision(model, x);
  std::vector<int> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, out[i])) out[i] = static_cast<int>(k);
  }
  return out;
}

OvoModel ovo_fit(const Matrix& x, const Labels& labels,
                 const BinaryBaseSpec& base) {
  if (labels.num_classes() < 2) {
    throw Error(ErrorCode::degenerate_labels,
                "one-vs-one needs at least two classes");
  }
  const int q = labels.num_classes();
  const auto counts = labels.class_counts();
  for (int k = 0; k < q; ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorCode::degenerate_labels,
                  "class " + labels.names[k] + " has no samples");
    }
  }

  OvoModel model;
  model.base = base;
  model.classes = labels;
  for (int j = 0; j < q; ++j)
    for (int k = j + 1; k < q; ++k) model.pairs.emplace_back(j, k);

  run_tasks(
      model.pairs.size(),
      [&](std::size_t t) {
        const auto [j, k] = model.pairs[t];
        std::vector<std::vector<double>> rows;
        std::vector<int> ys;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (labels.values[i] == j || labels.values[i] == k) {
            rows.emplace_back(x.row(i).begin(), x.row(i).end());
            ys.push_back(labels.values[i] == k ? 1 : 0);
          }
        }
        return fit_binary_base(base, Matrix::from_rows(rows),
                               binary_labels(std::move(ys)));
      },
      [&](std::size_t t) {
        const auto [j, k] = model.pairs[t];
        return labels.names[j] + " vs " + labels.names[k];
      },
      model.models);
  return model;
}

std::vector<int> ovo_predict(const OvoModel& model, const Matrix& x) {
  const int q = model.classes.num_classes();
  Matrix votes(x.rows(), q);
  Matrix confidence(x.rows(), q);
  for (std::size_t t = 0; t < model.pairs.size(); ++t) {
    const auto [j, k] = model.pairs[t];
    const auto s = model.models[t].decision(x);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const int winner = s[i] > 0.0 ? k : j;
      votes(i, winner) += 1.0;
      confidence(i, k) += s[i];
      confidence(i, j) -= s[i];
    }
  }
  std::vector<int> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < q; ++c) {
      if (votes(i, c) > votes(i, best) ||
          (votes(i, c) == votes(i, best) &&
           confidence(i, c) > confidence(i, best))) {
        best = c;
      }
    }
    out[i] = best;
  }
  return out;
}

Matrix sample_codebook(int q, int m, std::uint64_t seed) {
  if (m < 1 || (q > (1 << std::min(m, 30)))) {
    throw Error(ErrorCode::invalid_hyperparameter,
                "code book needs at least ceil(log2(q)) columns");
  }
  SeededRng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix book(q, m);
    for (int r = 0; r < q; ++r)
      for (int c = 0; c < m; ++c)
        book(r, c) = (rng.next_u64() & 1) ? 1.0 : -1.0;

    bool ok = true;
    for (int a = 0; a < q && ok; ++a)
      for (int b = a + 1; b < q && ok; ++b) {
        bool same = true;
        for (int c = 0; c < m; ++c)
          if (book(a, c) != book(b, c)) { same = false; break; }
        if (same) ok = false;
      }
    for (int c = 0; c < m && ok; ++c) {
      bool constant = true;
      for (int r = 1; r < q; ++r)
        if (book(r, c) != book(0, c)) { constant = false; break; }
      if (constant) ok = false;
    }
    if (ok) return book;
  }
  throw Error(ErrorCode::invalid_hyperparameter,
              "could not sample a valid code book in 1000 attempts");
}

EcocModel ecoc_fit(const Matrix& x, const Labels& labels,
                   const BinaryBaseSpec& base, int m, std::uint64_t seed) {
  if (labels.num_classes() < 2) {
    throw Error(ErrorCode::degenerate_labels,
                "ECOC needs at least two classes");
  }
  EcocModel model;
  model.base = base;
  model.classes = labels;
  model.seed = seed;
  model.codebook = sample_codebook(labels.num_classes(), m, seed);

  run_tasks(
      static_cast<std::size_t>(m),
      [&](std::size_t t) {
        std::vector<int> ys(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
          ys[i] = model.codebook(labels.values[i], t) > 0.0 ? 1 : 0;
        return fit_binary_base(base, x, binary_labels(std::move(ys)));
      },
      [&](std::size_t t) { return "code task " + std::to_string(t); },
      model.models);
  return model;
}

int nearest_code_row(const Matrix& codebook, std::span<const double> scores) {
  int best = 0;
  double best_d = squared_distance(codebook.row(0), scores);
  for (std::size_t r = 1; r < codebook.rows(); ++r) {
    const double d = squared_distance(codebook.row(r), scores);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(r);
    }
  }
  return best;
}

std::vector<int> ecoc_predict(const EcocModel& model, const Matrix& x) {
  Matrix scores(x.rows(), model.models.size());
  for (std::size_t t = 0; t < model.models.size(); ++t) {
    const auto s = model.models[t].decision(x);
    for (std::size_t i = 0; i < x.rows(); ++i) scores(i, t) = s[i];
  }
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    out[i] = nearest_code_row(model.codebook, scores.row(i));
  return out;
}

}  // namespace multiclass
}  // namespace classicml
