#include "sptb/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>
#include <thread>

namespace sptb {

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return max_workers();
}

int max_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  int procs = omp_get_num_procs();
  int n = static_cast<int>(hw);
  if (procs > n) n = procs;
  return n > 0 ? n : 1;
}

}  // namespace sptb
