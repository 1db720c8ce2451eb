#include "scssim/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace scssim::synthetic {

namespace {

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hash of an integer lattice point to [0, 1).
double lattice(std::uint64_t seed, std::int64_t i, std::int64_t j = 0) noexcept {
  const std::uint64_t h = mix(seed ^ mix(static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL ^
                                         static_cast<std::uint64_t>(j)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) noexcept { return t * t * (3.0 - 2.0 * t); }

// 1D value noise in [0, 1).
double noise1(std::uint64_t seed, double x) noexcept {
  const double f = std::floor(x);
  const auto i = static_cast<std::int64_t>(f);
  const double t = smooth(x - f);
  return lattice(seed, i) * (1.0 - t) + lattice(seed, i + 1) * t;
}

// 2D value noise in [0, 1).
double noise2(std::uint64_t seed, double x, double y) noexcept {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double top = lattice(seed, ix, iy) * (1 - tx) + lattice(seed, ix + 1, iy) * tx;
  const double bottom = lattice(seed, ix, iy + 1) * (1 - tx) + lattice(seed, ix + 1, iy + 1) * tx;
  return top * (1 - ty) + bottom * ty;
}

using Color = std::array<double, 3>;

Color lerp(const Color& a, const Color& b, double t) noexcept {
  return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t};
}

// Scene colour at (u, v), both measured in frame heights from the centre,
// v growing downwards.
Color scene(std::uint64_t seed, double u, double v) noexcept {
  constexpr double kHorizon = 0.04;
  // A wooded hill rises to the right of u = 0.1, giving one strong vertical edge.
  const double hill = u > 0.1 ? 0.1 : 0.0;
  const double treeline =
      -0.10 - hill - 0.10 * noise1(seed + 1, u * 5.0) - 0.03 * noise1(seed + 2, u * 23.0);

  if (v < treeline) {
    const double t = std::clamp((v + 0.7) / 0.7, 0.0, 1.0);
    Color sky = lerp({70, 120, 205}, {200, 215, 235}, t);
    const double cloud = noise2(seed + 4, u * 4.0, v * 9.0);
    if (cloud > 0.62) sky = lerp(sky, {245, 245, 250}, (cloud - 0.62) * 2.0);
    return sky;
  }
  if (v < kHorizon) {
    const double shade = 25 * noise2(seed + 5, u * 30.0, v * 30.0);
    return {30 + shade, 75 + shade, 35 + shade * 0.5};
  }
  const double depth = std::clamp((v - kHorizon) / 0.5, 0.0, 1.0);
  Color water = lerp({95, 125, 150}, {25, 50, 80}, depth);
  const double reflection = kHorizon + (kHorizon - treeline) * 0.6;
  if (v < reflection) water = lerp(water, {25, 55, 40}, 0.6);
  const double ripple = 18 * (noise2(seed + 6, u * 8.0, v * 70.0) - 0.5);
  return {water[0] + ripple, water[1] + ripple, water[2] + ripple};
}

std::uint8_t to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

RgbImage landscape(int width, int height, std::uint64_t seed, double angle_degrees) {
  RgbImage img(width, height);
  const double theta = angle_degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  const double scale = 1.0 / height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x - cx) * scale;
      const double dy = (y - cy) * scale;
      // inverse counter-clockwise turn, as in the rotation distortion
      const double u = cs * dx - sn * dy;
      const double v = sn * dx + cs * dy;
      const Color c = scene(seed, u, v);
      const double fine = 10 * (lattice(seed + 7, x, y) - 0.5);
      img.set(x, y, {to_byte(c[0] + fine), to_byte(c[1] + fine), to_byte(c[2] + fine)});
    }
  }
  return img;
}

RgbImage random_image(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RgbImage img(width, height);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() >> 56);
  return img;
}

RgbImage two_bands(int width, int height, int split, bool horizontal, Rgb first, Rgb second) {
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) img.set(x, y, (horizontal ? y : x) < split ? first : second);
  }
  return img;
}

}  // namespace scssim::synthetic
