// Times the serial reference kernels against their OpenMP counterparts and
// checks that both produce bit-identical output. Thread count comes from
// --threads (default: hardware concurrency).

#include <chrono>
#include <cstdio>
#include <string>
#include <thread>

#include "classicml/clustering.hpp"
#include "classicml/kernels.hpp"
#include "classicml/pairwise.hpp"
#include "classicml/rng.hpp"

namespace cml = classicml;

namespace {

cml::Matrix random_matrix(std::size_t n, std::size_t p, cml::SeededRng& rng) {
  cml::Matrix m(n, p);
  for (double& v : m.data()) v = rng.next_double() * 2.0 - 1.0;
  return m;
}

template <typename F>
double time_ms(F&& fn, int repeats = 3) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    best = std::min(
        best,
        std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-28s serial %8.2f ms   omp %8.2f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::size_t n = 2000;
  for (int i = 1; i + 1 < argc + 1; ++i) {
    const std::string arg = argv[i] ? argv[i] : "";
    if (arg == "--threads" && i + 1 < argc) threads = std::atoi(argv[++i]);
    if (arg == "--n" && i + 1 < argc) n = std::strtoull(argv[++i], nullptr, 10);
  }
  if (threads < 1) threads = 1;
  std::printf("threads: %d, n: %zu\n", threads, n);

  cml::SeededRng rng(42);
  const cml::Matrix a = random_matrix(n, 16, rng);
  const cml::Matrix b = random_matrix(n / 2, 16, rng);

  {
    cml::Matrix serial, parallel;
    const double ts =
        time_ms([&] { serial = cml::pairwise_sq_dists_serial(a, b); });
    const double tp = time_ms(
        [&] { parallel = cml::pairwise_sq_dists_omp(a, b, threads); });
    report("pairwise squared distances", ts, tp, serial == parallel);
  }

  {
    cml::kernels::KernelSpec spec;
    spec.kind = cml::kernels::KernelKind::rbf;
    spec.gamma = 0.5;
    cml::Matrix serial, parallel;
    const double ts =
        time_ms([&] { serial = cml::kernels::gram_serial(spec, a, a); });
    const double tp =
        time_ms([&] { parallel = cml::kernels::gram_omp(spec, a, a, threads); });
    report("rbf gram matrix", ts, tp, serial == parallel);
  }

  {
    // The assignment step dominates Lloyd iterations.
    cml::SeededRng init_rng(7);
    const cml::Matrix centroids = cml::clustering::kmeans_pp_init(a, 32, init_rng);
    std::pair<std::vector<int>, double> serial, parallel;
    const double ts = time_ms(
        [&] { serial = cml::clustering::assign_clusters_threads(a, centroids, 1); });
    const double tp = time_ms([&] {
      parallel = cml::clustering::assign_clusters_threads(a, centroids, threads);
    });
    report("k-means assignment step", ts, tp,
           serial.first == parallel.first && serial.second == parallel.second);
  }

  return 0;
}
