#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classicml/core.hpp"
#include "classicml/rng.hpp"

namespace classicml {
namespace clustering {

enum class Accel { lloyd, elkan };

struct KMeansModel {
  Matrix centroids;  // k x p
  std::vector<int> assignments;
  double inertia = 0.0;
  int iterations = 0;
  int best_restart = 0;
  int k = 0;
  std::uint64_t seed = 0;
  // Inertia measured at each assignment step of the winning restart;
  // non-increasing by construction of Lloyd's iteration.
  std::vector<double> inertia_trace;
};

// k-means++ seeding: first centroid uniform over rows, each next drawn with
// probability proportional to the squared distance to the nearest chosen
// centroid.
Matrix kmeans_pp_init(const Matrix& x, int k, SeededRng& rng);

struct KMeansRun {
  Matrix centroids;
  std::vector<int> assignments;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

// One run from the given initial centroids. The Elkan path maintains
// per-point upper/lower distance bounds and produces assignments, centroids
// and trace identical to the Lloyd path.
KMeansRun kmeans_run(const Matrix& x, Matrix centroids, int max_iter,
                     Accel accel);

KMeansModel kmeans_fit(const Matrix& x, int k, int restarts = 10,
                       int max_iter = 300, Accel accel = Accel::lloyd,
                       std::uint64_t seed = 0);

// Nearest-centroid assignment (ties to the lowest cluster index) and the
// within-cluster sum of squares.
std::pair<std::vector<int>, double> assign_clusters(const Matrix& x,
                                                    const Matrix& centroids);

// Same computation with an explicit thread count; output is bit-identical
// for any value. Used by the serial-vs-OpenMP benchmark.
std::pair<std::vector<int>, double> assign_clusters_threads(
    const Matrix& x, const Matrix& centroids, int threads);

struct GmmModel {
  Matrix means;  // k x p
  std::vector<Matrix> covariances;
  std::vector<double> weights;
  double log_likelihood = 0.0;
  int iterations = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<double> loglik_trace;
};

// Expectation-Maximization for a Gaussian mixture. Responsibilities are
// computed in log space (log-sum-exp), covariances get a 1e-6*(trace/p)
// diagonal jitter every M-step, and iteration stops when the log-likelihood
// moves by less than tol.
GmmModel gmm_fit_em(const Matrix& x, int k, int max_iter = 200,
                    double tol = 1e-6, std::uint64_t seed = 0);

Matrix gmm_responsibilities(const GmmModel& model, const Matrix& x);
std::vector<int> gmm_predict(const GmmModel& model, const Matrix& x);
double gmm_log_likelihood(const GmmModel& model, const Matrix& x);

std::string accel_name(Accel a);
Accel accel_from_name(const std::string& name);

}  // namespace clustering
}  // namespace classicml
