#include "classicml/parallel.hpp"

#include <cstdlib>
#include <string>

namespace classicml {

namespace {

int read_thread_env() {
  const char* env = std::getenv("CLASSICML_THREADS");
  if (env == nullptr) return 1;
  try {
    int n = std::stoi(env);
    return n >= 1 ? n : 1;
  } catch (...) {
    return 1;
  }
}

}  // namespace

int thread_count() {
  static const int cached = read_thread_env();
  return cached;
}

}  // namespace classicml
