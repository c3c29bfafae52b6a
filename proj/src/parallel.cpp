#include "ramat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ramat {

int worker_count() {
  if (const char* env = std::getenv("RAMAT_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ramat
