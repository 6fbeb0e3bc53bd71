#include <doctest.h>

#include <cstdlib>
#include <random>

#include "citits/kernels.hpp"
#include "support.hpp"

using namespace citits;

namespace {

// Straight double loop, written independently of the library kernels.
kernels::DiffCounts brute(const Raster& a, const Raster& b, const Mask& m, int tol) {
  kernels::DiffCounts c;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!m.at(x, y)) continue;
      ++c.masked;
      const auto p = a.at(x, y);
      const auto q = b.at(x, y);
      if (std::abs(p.r - q.r) > tol || std::abs(p.g - q.g) > tol || std::abs(p.b - q.b) > tol) {
        ++c.changed;
      }
    }
  }
  return c;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree with the brute-force count") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const int w = 1 + static_cast<int>(rng() % 64);
    const int h = 1 + static_cast<int>(rng() % 64);
    const auto a = testing::random_raster(rng, w, h);
    auto b = a;
    // Perturb a random subset by small and large amounts.
    for (auto& px : b.pixels()) {
      const int d = static_cast<int>(rng() % 41) - 20;
      px.g = static_cast<std::uint8_t>(std::clamp(px.g + d, 0, 255));
    }
    const auto m = testing::random_mask(rng, w, h);
    const int tol = static_cast<int>(rng() % 16);
    Raster ps(w, h), pp(w, h);
    const auto s = kernels::diff_serial(a, b, m, tol, &ps);
    const auto p = kernels::diff_parallel(a, b, m, tol, &pp);
    const auto o = brute(a, b, m, tol);
    CHECK(s == o);
    CHECK(p == o);
    CHECK(ps == pp);
  }
}

TEST_CASE("processed image holds only white and red") {
  std::mt19937_64 rng(3);
  const auto a = testing::random_raster(rng, 20, 20);
  const auto b = testing::random_raster(rng, 20, 20);
  const auto m = testing::random_mask(rng, 20, 20);
  Raster out(20, 20, Rgb{1, 1, 1});
  const auto c = kernels::diff_parallel(a, b, m, 10, &out);
  std::size_t red = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const auto px = out.at(x, y);
      CHECK((px == kWhite || px == kRed));
      if (px == kRed) {
        CHECK(m.at(x, y));
        ++red;
      }
    }
  }
  CHECK(red == c.changed);
}

TEST_CASE("kernels report at least one thread") { CHECK(kernels::max_threads() >= 1); }
