#pragma once

#include <cstddef>

#include "citits/raster.hpp"

// Pixel-difference kernels. The serial version is the reference the OpenMP
// version is tested against; both must agree exactly.
namespace citits::kernels {

struct DiffCounts {
  std::size_t changed = 0;  // masked pixels outside tolerance
  std::size_t masked = 0;

  friend bool operator==(const DiffCounts&, const DiffCounts&) = default;
};

// A pixel is unchanged iff every channel differs by at most `tolerance`.
// When `processed` is non-null it receives white for unchanged or unmasked
// pixels and red for changed masked pixels. Inputs must share dimensions.
DiffCounts diff_serial(const Raster& baseline, const Raster& current, const Mask& mask,
                       int tolerance, Raster* processed);

DiffCounts diff_parallel(const Raster& baseline, const Raster& current, const Mask& mask,
                         int tolerance, Raster* processed);

// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace citits::kernels
