#include "itc/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace itc {

int worker_count() {
  if (const char* env = std::getenv("ITC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace itc
