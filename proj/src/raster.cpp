#include "citits/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "citits/error.hpp"

namespace citits {

namespace {

void require_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::OutOfRange, "raster dimensions must be positive");
  }
}

// Cursor over a PNM header: magic, then whitespace-separated integers with
// '#' comments allowed between tokens.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') {
      throw Error(ErrorCode::BadFormat, "not a PNM file");
    }
    pos_ = 2;
    return {static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
  }

  int integer() {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) throw Error(ErrorCode::BadFormat, "PNM header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::BadFormat, "malformed PNM header");
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::span<const std::uint8_t> payload() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::BadFormat, "malformed PNM header");
    }
    return bytes_.subspan(pos_ + 1);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

void append_header(std::vector<std::uint8_t>& out, const std::string& header) {
  out.insert(out.end(), header.begin(), header.end());
}

Raster decode_p6_payload(int w, int h, std::span<const std::uint8_t> data) {
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (data.size() < need) throw Error(ErrorCode::BadFormat, "truncated P6 raster");
  Raster raster(w, h);
  auto px = raster.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  }
  return raster;
}

}  // namespace

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
  require_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  require_dims(width, height);
  cells_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

std::vector<std::uint8_t> encode_ppm(const Raster& raster) {
  std::vector<std::uint8_t> out;
  append_header(out, "P6\n" + std::to_string(raster.width()) + " " +
                         std::to_string(raster.height()) + "\n255\n");
  out.reserve(out.size() + raster.size() * 3);
  for (const Rgb& p : raster.pixels()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

Raster decode_ppm(std::span<const std::uint8_t> bytes) {
  HeaderReader hdr(bytes);
  if (hdr.magic() != "P6") throw Error(ErrorCode::BadFormat, "expected P6 pixmap");
  const int w = hdr.integer();
  const int h = hdr.integer();
  const int maxval = hdr.integer();
  if (w <= 0 || h <= 0) throw Error(ErrorCode::BadFormat, "P6 dimensions must be positive");
  if (maxval != 255) throw Error(ErrorCode::BadFormat, "only maxval 255 is supported");
  return decode_p6_payload(w, h, hdr.payload());
}

void write_ppm(const std::filesystem::path& path, const Raster& raster) {
  dump(path, encode_ppm(raster));
}

Raster read_ppm(const std::filesystem::path& path) { return decode_ppm(slurp(path)); }

std::vector<std::uint8_t> encode_pbm(const Mask& mask) {
  std::vector<std::uint8_t> out;
  append_header(out, "P4\n" + std::to_string(mask.width()) + " " +
                         std::to_string(mask.height()) + "\n");
  const int row_bytes = (mask.width() + 7) / 8;
  for (int y = 0; y < mask.height(); ++y) {
    for (int bx = 0; bx < row_bytes; ++bx) {
      std::uint8_t byte = 0;
      for (int bit = 0; bit < 8; ++bit) {
        const int x = bx * 8 + bit;
        if (x < mask.width() && !mask.at(x, y)) byte |= static_cast<std::uint8_t>(0x80u >> bit);
      }
      out.push_back(byte);
    }
  }
  return out;
}

Mask decode_mask(std::span<const std::uint8_t> bytes) {
  HeaderReader hdr(bytes);
  const std::string magic = hdr.magic();
  if (magic == "P4") {
    const int w = hdr.integer();
    const int h = hdr.integer();
    if (w <= 0 || h <= 0) throw Error(ErrorCode::BadFormat, "P4 dimensions must be positive");
    auto data = hdr.payload();
    const std::size_t row_bytes = static_cast<std::size_t>((w + 7) / 8);
    if (data.size() < row_bytes * h) throw Error(ErrorCode::BadFormat, "truncated P4 bitmap");
    Mask mask(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t byte = data[row_bytes * y + x / 8];
        const bool black = (byte >> (7 - x % 8)) & 1u;
        mask.set(x, y, !black);
      }
    }
    return mask;
  }
  if (magic == "P6") {
    const int w = hdr.integer();
    const int h = hdr.integer();
    const int maxval = hdr.integer();
    if (w <= 0 || h <= 0) throw Error(ErrorCode::BadFormat, "P6 dimensions must be positive");
    if (maxval != 255) throw Error(ErrorCode::BadFormat, "only maxval 255 is supported");
    const Raster img = decode_p6_payload(w, h, hdr.payload());
    Mask mask(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) mask.set(x, y, img.at(x, y) == kWhite);
    }
    return mask;
  }
  throw Error(ErrorCode::BadFormat, "mask must be P4 or P6");
}

void write_pbm(const std::filesystem::path& path, const Mask& mask) {
  dump(path, encode_pbm(mask));
}

Mask read_mask(const std::filesystem::path& path) { return decode_mask(slurp(path)); }

}  // namespace citits
