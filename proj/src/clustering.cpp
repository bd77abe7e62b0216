#include "classicml/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "classicml/linalg.hpp"
#include "classicml/parallel.hpp"

namespace classicml {
namespace clustering {

Matrix kmeans_pp_init(const Matrix& x, int k, SeededRng& rng) {
  const std::size_t n = x.rows();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::invalid_hyperparameter, "k must lie in [1, n]");
  }
  Matrix centroids(k, x.cols());
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());

  std::size_t pick = rng.uniform_int(n);
  for (int c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < x.cols(); ++j)
      centroids(c, j) = x(pick, j);
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_sq[i] = std::min(min_sq[i], squared_distance(x.row(i), centroids.row(c)));
      total += min_sq[i];
    }
    if (total <= 0.0) {
      // All remaining mass at already-chosen points; fall back to uniform.
      pick = rng.uniform_int(n);
      continue;
    }
    const double u = rng.next_double() * total;
    double cum = 0.0;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      cum += min_sq[i];
      if (u < cum) {
        pick = i;
        break;
      }
    }
  }
  return centroids;
}

std::pair<std::vector<int>, double> assign_clusters(const Matrix& x,
                                                    const Matrix& centroids) {
  return assign_clusters_threads(x, centroids, thread_count());
}

std::pair<std::vector<int>, double> assign_clusters_threads(
    const Matrix& x, const Matrix& centroids, int threads) {
  if (x.cols() != centroids.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "centroid width differs from data");
  }
  const std::size_t n = x.rows();
  const std::size_t k = centroids.rows();
  std::vector<int> assignments(n, 0);
  std::vector<double> best_sq(n, 0.0);
  parallel_for_threads(threads, n, [&](std::size_t i) {
    int best = 0;
    double bd = squared_distance(x.row(i), centroids.row(0));
    for (std::size_t j = 1; j < k; ++j) {
      const double d = squared_distance(x.row(i), centroids.row(j));
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    assignments[i] = best;
    best_sq[i] = bd;
  });
  double inertia = 0.0;
  for (double d : best_sq) inertia += d;
  return {std::move(assignments), inertia};
}

namespace {

Matrix centroid_means(const Matrix& x, const std::vector<int>& assignments,
                      std::size_t k, const Matrix& fallback) {
  Matrix centroids(k, x.cols());
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const int a = assignments[i];
    ++counts[a];
    for (std::size_t j = 0; j < x.cols(); ++j) centroids(a, j) += x(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      for (std::size_t j = 0; j < x.cols(); ++j)
        centroids(c, j) = fallback(c, j);
      continue;
    }
    for (std::size_t j = 0; j < x.cols(); ++j)
      centroids(c, j) /= static_cast<double>(counts[c]);
  }
  return centroids;
}

// Empty-cluster repair: each empty cluster takes the point farthest from its
// centroid inside the currently highest-inertia cluster. Returns true when
// anything moved.
bool repair_empty(const Matrix& x, const Matrix& centroids,
                  std::vector<int>& assignments, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (int a : assignments) ++counts[a];
  bool moved = false;
  for (std::size_t empty = 0; empty < k; ++empty) {
    if (counts[empty] != 0) continue;
    std::vector<double> cluster_inertia(k, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      cluster_inertia[assignments[i]] +=
          squared_distance(x.row(i), centroids.row(assignments[i]));
    }
    std::size_t donor = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (cluster_inertia[c] > cluster_inertia[donor]) donor = c;
    int farthest = -1;
    double far_d = -1.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (assignments[i] != static_cast<int>(donor)) continue;
      if (counts[donor] <= 1) break;
      const double d = squared_distance(x.row(i), centroids.row(donor));
      if (d > far_d) {
        far_d = d;
        farthest = static_cast<int>(i);
      }
    }
    if (farthest < 0) continue;
    assignments[farthest] = static_cast<int>(empty);
    --counts[donor];
    ++counts[empty];
    moved = true;
  }
  return moved;
}

KMeansRun run_lloyd(const Matrix& x, Matrix centroids, int max_iter) {
  const std::size_t k = centroids.rows();
  KMeansRun run;
  auto [assignments, first_inertia] = assign_clusters(x, centroids);
  run.trace.push_back(first_inertia);
  run.iterations = 1;
  std::vector<int> prev(assignments.size());
  for (int iter = 2; iter <= max_iter; ++iter) {
    repair_empty(x, centroids, assignments, k);
    prev = assignments;
    centroids = centroid_means(x, assignments, k, centroids);
    auto [next, inertia] = assign_clusters(x, centroids);
    assignments = std::move(next);
    run.trace.push_back(inertia);
    run.iterations = iter;
    if (assignments == prev) break;
  }
  run.assignments = std::move(assignments);
  run.centroids = std::move(centroids);
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    inertia +=
        squared_distance(x.row(i), run.centroids.row(run.assignments[i]));
  }
  run.inertia = inertia;
  return run;
}

// Elkan's acceleration. Bounds are kept slightly conservative (one relative
// epsilon per update) so floating-point rounding can never prune a centroid
// that exact arithmetic would keep; every comparison that decides an
// assignment uses exactly the same squared distances as the Lloyd path, and
// the repair/update/assign ordering matches run_lloyd step for step.
KMeansRun run_elkan(const Matrix& x, Matrix centroids, int max_iter) {
  const std::size_t n = x.rows();
  const std::size_t k = centroids.rows();
  constexpr double kInflate = 1.0 + 1e-15;
  constexpr double kDeflate = 1.0 - 1e-15;

  KMeansRun run;
  std::vector<int> assignments(n, 0);
  std::vector<double> upper(n, 0.0);
  Matrix lower(n, k);

  // First assignment: exact distances everywhere, as in Lloyd.
  std::vector<double> first_sq(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    int best = 0;
    double best_sq = squared_distance(x.row(i), centroids.row(0));
    lower(i, 0) = std::sqrt(best_sq);
    for (std::size_t j = 1; j < k; ++j) {
      const double d_sq = squared_distance(x.row(i), centroids.row(j));
      lower(i, j) = std::sqrt(d_sq);
      if (d_sq < best_sq) {
        best_sq = d_sq;
        best = static_cast<int>(j);
      }
    }
    assignments[i] = best;
    upper[i] = std::sqrt(best_sq);
    first_sq[i] = best_sq;
  });
  double first_inertia = 0.0;
  for (double d : first_sq) first_inertia += d;
  run.trace.push_back(first_inertia);
  run.iterations = 1;

  Matrix center_dist(k, k);
  std::vector<double> half_nearest(k, 0.0);
  std::vector<int> prev(n);

  for (int iter = 2; iter <= max_iter; ++iter) {
    if (repair_empty(x, centroids, assignments, k)) {
      parallel_for(n, [&](std::size_t i) {
        upper[i] = euclidean_distance(x.row(i), centroids.row(assignments[i]));
      });
    }
    prev = assignments;

    const Matrix updated = centroid_means(x, assignments, k, centroids);
    std::vector<double> shift(k);
    for (std::size_t j = 0; j < k; ++j) {
      shift[j] = euclidean_distance(centroids.row(j), updated.row(j));
    }
    centroids = updated;
    parallel_for(n, [&](std::size_t i) {
      upper[i] = (upper[i] + shift[assignments[i]]) * kInflate;
      for (std::size_t j = 0; j < k; ++j) {
        lower(i, j) = std::max(0.0, (lower(i, j) - shift[j]) * kDeflate);
      }
    });

    for (std::size_t a = 0; a < k; ++a) {
      center_dist(a, a) = 0.0;
      for (std::size_t b = a + 1; b < k; ++b) {
        const double d =
            kDeflate * euclidean_distance(centroids.row(a), centroids.row(b));
        center_dist(a, b) = d;
        center_dist(b, a) = d;
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < k; ++o)
        if (o != j) nearest = std::min(nearest, center_dist(j, o));
      half_nearest[j] = 0.5 * nearest;
    }

    std::vector<double> assigned_sq(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
      int a = assignments[i];
      // Strict comparisons only: when a bound ties the upper bound we must
      // still look, or an equal-distance centroid with a lower index could
      // be missed.
      if (upper[i] < half_nearest[a]) {
        assigned_sq[i] = squared_distance(x.row(i), centroids.row(a));
        return;
      }
      double best_sq = squared_distance(x.row(i), centroids.row(a));
      upper[i] = std::sqrt(best_sq);
      lower(i, a) = upper[i];
      for (std::size_t j = 0; j < k; ++j) {
        if (j == static_cast<std::size_t>(a)) continue;
        if (lower(i, j) > upper[i]) continue;
        if (0.5 * center_dist(a, j) > upper[i]) continue;
        const double d_sq = squared_distance(x.row(i), centroids.row(j));
        const double d = std::sqrt(d_sq);
        lower(i, j) = d;
        if (d_sq < best_sq ||
            (d_sq == best_sq && static_cast<int>(j) < a)) {
          best_sq = d_sq;
          a = static_cast<int>(j);
          upper[i] = d;
        }
      }
      assignments[i] = a;
      assigned_sq[i] = best_sq;
    });

    double inertia = 0.0;
    for (double d : assigned_sq) inertia += d;
    run.trace.push_back(inertia);
    run.iterations = iter;
    if (assignments == prev) break;
  }

  run.assignments = std::move(assignments);
  run.centroids = std::move(centroids);
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    inertia +=
        squared_distance(x.row(i), run.centroids.row(run.assignments[i]));
  }
  run.inertia = inertia;
  return run;
}

}  // namespace

KMeansRun kmeans_run(const Matrix& x, Matrix centroids, int max_iter,
                     Accel accel) {
  if (x.cols() != centroids.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "centroid width differs from data");
  }
  return accel == Accel::lloyd ? run_lloyd(x, std::move(centroids), max_iter)
                               : run_elkan(x, std::move(centroids), max_iter);
}

KMeansModel kmeans_fit(const Matrix& x, int k, int restarts, int max_iter,
                       Accel accel, std::uint64_t seed) {
  if (x.rows() == 0) throw Error(ErrorCode::empty_dataset, "no rows");
  check_finite(x, "X");
  if (k < 1 || static_cast<std::size_t>(k) > x.rows()) {
    throw Error(ErrorCode::invalid_hyperparameter, "k must lie in [1, n]");
  }
  if (restarts < 1) {
    throw Error(ErrorCode::invalid_hyperparameter, "restarts must be >= 1");
  }
  if (max_iter < 1) {
    throw Error(ErrorCode::invalid_hyperparameter, "max_iter must be >= 1");
  }

  const auto seeds = SeededRng::split_seeds(seed, restarts);
  KMeansModel best;
  for (int r = 0; r < restarts; ++r) {
    SeededRng rng(seeds[r]);
    KMeansRun run = kmeans_run(x, kmeans_pp_init(x, k, rng), max_iter, accel);
    if (r == 0 || run.inertia < best.inertia) {
      best.centroids = std::move(run.centroids);
      best.assignments = std::move(run.assignments);
      best.inertia = run.inertia;
      best.iterations = run.iterations;
      best.inertia_trace = std::move(run.trace);
      best.best_restart = r;
    }
  }
  best.k = k;
  best.seed = seed;
  return best;
}

namespace {

struct ComponentDensity {
  linalg::Cholesky chol;
  double log_norm;  // -(p/2) log(2 pi) - (1/2) log|Sigma|

  explicit ComponentDensity(const Matrix& cov)
      : chol(cov),
        log_norm(-0.5 * (static_cast<double>(cov.rows()) *
                             std::log(2.0 * std::numbers::pi) +
                         chol.log_det())) {}

  double log_density(std::span<const double> x,
                     std::span<const double> mean) const {
    std::vector<double> diff(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) diff[j] = x[j] - mean[j];
    const auto z = chol.solve_lower(diff);
    double quad = 0.0;
    for (double v : z) quad += v * v;
    return log_norm - 0.5 * quad;
  }
};

void add_cov_jitter(Matrix& cov) {
  double trace = 0.0;
  for (std::size_t i = 0; i < cov.rows(); ++i) trace += cov(i, i);
  const double jitter = 1e-6 * trace / static_cast<double>(cov.rows());
  for (std::size_t i = 0; i < cov.rows(); ++i) cov(i, i) += jitter;
}

// Fills per-row log responsibilities and returns the log-likelihood.
double e_step(const Matrix& x, const GmmModel& model, Matrix& resp) {
  const std::size_t n = x.rows();
  const int k = model.k;
  std::vector<ComponentDensity> densities;
  densities.reserve(k);
  std::vector<double> log_w(k);
  for (int j = 0; j < k; ++j) {
    densities.emplace_back(model.covariances[j]);
    log_w[j] = std::log(model.weights[j]);
  }
  std::vector<double> row_lse(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      const double l =
          log_w[j] + densities[j].log_density(x.row(i), model.means.row(j));
      resp(i, j) = l;
      m = std::max(m, l);
    }
    double denom = 0.0;
    for (int j = 0; j < k; ++j) denom += std::exp(resp(i, j) - m);
    const double lse = m + std::log(denom);
    for (int j = 0; j < k; ++j) resp(i, j) = std::exp(resp(i, j) - lse);
    row_lse[i] = lse;
  });
  double ll = 0.0;
  for (double v : row_lse) ll += v;
  return ll;
}

}  // namespace

GmmModel gmm_fit_em(const Matrix& x, int k, int max_iter, double tol,
                    std::uint64_t seed) {
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorCode::empty_dataset, "no rows");
  check_finite(x, "X");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::invalid_hyperparameter, "k must lie in [1, n]");
  }
  if (max_iter < 1) {
    throw Error(ErrorCode::invalid_hyperparameter, "max_iter must be >= 1");
  }
  const std::size_t p = x.cols();

  GmmModel model;
  model.k = k;
  model.seed = seed;
  SeededRng rng(seed);
  model.means = kmeans_pp_init(x, k, rng);
  Matrix base_cov = linalg::covariance(x, linalg::CovDivisor::n);
  add_cov_jitter(base_cov);
  model.covariances.assign(k, base_cov);
  model.weights.assign(k, 1.0 / static_cast<double>(k));

  Matrix resp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iter; ++iter) {
    const double ll = e_step(x, model, resp);
    model.log_likelihood = ll;
    model.loglik_trace.push_back(ll);
    model.iterations = iter;
    if (std::abs(ll - prev_ll) < tol) break;
    prev_ll = ll;

    // M-step.
    for (int j = 0; j < k; ++j) {
      double nj = 0.0;
      for (std::size_t i = 0; i < n; ++i) nj += resp(i, j);
      const double weight = nj / static_cast<double>(n);
      if (weight < 1e-12) {
        throw Error(ErrorCode::degenerate_component,
                    "mixture component " + std::to_string(j) + " collapsed");
      }
      model.weights[j] = weight;
      for (std::size_t d = 0; d < p; ++d) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += resp(i, j) * x(i, d);
        model.means(j, d) = s / nj;
      }
      Matrix cov(p, p);
      for (std::size_t i = 0; i < n; ++i) {
        const double g = resp(i, j);
        for (std::size_t a = 0; a < p; ++a) {
          const double da = x(i, a) - model.means(j, a);
          for (std::size_t b = a; b < p; ++b) {
            cov(a, b) += g * da * (x(i, b) - model.means(j, b));
          }
        }
      }
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
          cov(a, b) /= nj;
          cov(b, a) = cov(a, b);
        }
      add_cov_jitter(cov);
      model.covariances[j] = std::move(cov);
    }
  }
  return model;
}

Matrix gmm_responsibilities(const GmmModel& model, const Matrix& x) {
  if (x.cols() != model.means.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  Matrix resp(x.rows(), model.k);
  e_step(x, model, resp);
  return resp;
}

std::vector<int> gmm_predict(const GmmModel& model, const Matrix& x) {
  const Matrix resp = gmm_responsibilities(model, x);
  std::vector<int> out(x.rows(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (int j = 1; j < model.k; ++j)
      if (resp(i, j) > resp(i, out[i])) out[i] = j;
  }
  return out;
}

double gmm_log_likelihood(const GmmModel& model, const Matrix& x) {
  if (x.cols() != model.means.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input width differs from model");
  }
  Matrix resp(x.rows(), model.k);
  return e_step(x, model, resp);
}

std::string accel_name(Accel a) {
  return a == Accel::lloyd ? "lloyd" : "elkan";
}

Accel accel_from_name(const std::string& name) {
  if (name == "lloyd") return Accel::lloyd;
  if (name == "elkan") return Accel::elkan;
  throw Error(ErrorCode::config, "unknown acceleration: " + name);
}

}  // namespace clustering
}  // namespace classicml
