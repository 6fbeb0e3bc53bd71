#include <cstdlib>

#include "citits/kernels.hpp"

namespace citits::kernels {

namespace {

inline bool differs(const Rgb& a, const Rgb& b, int tolerance) {
  return std::abs(a.r - b.r) > tolerance || std::abs(a.g - b.g) > tolerance ||
         std::abs(a.b - b.b) > tolerance;
}

}  // namespace

DiffCounts diff_serial(const Raster& baseline, const Raster& current, const Mask& mask,
                       int tolerance, Raster* processed) {
  DiffCounts counts;
  const auto base = baseline.pixels();
  const auto cur = current.pixels();
  const auto roi = mask.cells();
  for (std::size_t i = 0; i < base.size(); ++i) {
    bool red = false;
    if (roi[i]) {
      ++counts.masked;
      red = differs(base[i], cur[i], tolerance);
      if (red) ++counts.changed;
    }
    if (processed) processed->pixels()[i] = red ? kRed : kWhite;
  }
  return counts;
}

}  // namespace citits::kernels
