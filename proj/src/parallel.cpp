#include "geomadapt/parallel.hpp"

#include <omp.h>

namespace geomadapt {

int worker_threads() { return omp_get_max_threads(); }

}  // namespace geomadapt
