#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "citits/kernels.hpp"

namespace citits::kernels {

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

DiffCounts diff_parallel(const Raster& baseline, const Raster& current, const Mask& mask,
                         int tolerance, Raster* processed) {
  const Rgb* base = baseline.pixels().data();
  const Rgb* cur = current.pixels().data();
  const std::uint8_t* roi = mask.cells().data();
  Rgb* out = processed ? processed->pixels().data() : nullptr;
  const long n = static_cast<long>(baseline.size());

  std::size_t changed = 0;
  std::size_t masked = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed, masked)
  for (long i = 0; i < n; ++i) {
    bool red = false;
    if (roi[i]) {
      ++masked;
      red = std::abs(base[i].r - cur[i].r) > tolerance ||
            std::abs(base[i].g - cur[i].g) > tolerance ||
            std::abs(base[i].b - cur[i].b) > tolerance;
      changed += red ? 1 : 0;
    }
    if (out) out[i] = red ? kRed : kWhite;
  }
  return {changed, masked};
}

}  // namespace citits::kernels
