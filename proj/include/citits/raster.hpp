#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace citits {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kRed{255, 0, 0};

// Row-major RGB image. Width and height are always positive.
class Raster {
 public:
  Raster(int width, int height, Rgb fill = kWhite);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<Rgb> pixels() noexcept { return pixels_; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }

  bool same_dims(const Raster& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

// Region-of-interest bitmap; true marks road surface.
class Mask {
 public:
  Mask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool at(int x, int y) const { return cells_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { cells_[index(x, y)] = v ? 1 : 0; }

  std::span<const std::uint8_t> cells() const noexcept { return cells_; }

  std::size_t count() const noexcept;

  bool same_dims(const Raster& r) const noexcept {
    return width_ == r.width() && height_ == r.height();
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const Raster& raster);
Raster decode_ppm(std::span<const std::uint8_t> bytes);
void write_ppm(const std::filesystem::path& path, const Raster& raster);
Raster read_ppm(const std::filesystem::path& path);

// Masks: P4 bitmap (set bit = black = not road, so road cells are 0 bits)
// or a P6 image where white pixels mark road.
std::vector<std::uint8_t> encode_pbm(const Mask& mask);
Mask decode_mask(std::span<const std::uint8_t> bytes);
void write_pbm(const std::filesystem::path& path, const Mask& mask);
Mask read_mask(const std::filesystem::path& path);

}  // namespace citits
