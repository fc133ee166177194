#include "bell/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace bell {

int worker_count() {
  int n = omp_get_max_threads();
  if (const char* cap = std::getenv("BELL_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && v > 0) n = std::min<long>(n, v);
  }
  return std::max(n, 1);
}

}  // namespace bell
