#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scssim {

/// Largest accepted width or height. Keeps every integral-sum quantity
/// inside exact 64/128-bit integer range.
inline constexpr int kMaxImageExtent = 16384;

using Rgb = std::array<std::uint8_t, 3>;

/// Owned 8-bit RGB raster, row-major, three interleaved channels.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {0, 0, 0});
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const noexcept {
    const std::uint8_t* p = &data_[offset(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    std::uint8_t* p = &data_[offset(x, y)];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }
  std::uint8_t channel(int x, int y, int c) const noexcept {
    return data_[offset(x, y) + static_cast<std::size_t>(c)];
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Region {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(width()) * height();
  }
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }

  static Region full(int width, int height) { return {0, 0, width, height}; }

  friend bool operator==(const Region&, const Region&) = default;
};

/// Loads an 8-bit PNG (gray, gray+alpha, RGB, RGBA) or a binary P6 PPM with
/// maxval 255. Gray is replicated to three channels, alpha is dropped.
RgbImage load_image(const std::filesystem::path& path);

RgbImage decode_ppm(std::span<const std::uint8_t> bytes);
RgbImage decode_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_ppm(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

/// Writes PNG when the extension is ".png", binary PPM otherwise.
void save_image(const RgbImage& img, const std::filesystem::path& path);

}  // namespace scssim
