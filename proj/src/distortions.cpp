#include "scssim/distortions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "scssim/error.hpp"

namespace scssim {

namespace {

using Color = std::array<double, 3>;

std::uint8_t to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Bilinear sample at a real-valued pixel position, clamping to the edge.
Color sample(const RgbImage& img, double fx, double fy) noexcept {
  fx = std::clamp(fx, 0.0, static_cast<double>(img.width() - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double ax = fx - x0;
  const double ay = fy - y0;
  Color out{};
  for (int c = 0; c < 3; ++c) {
    const double top = img.channel(x0, y0, c) * (1.0 - ax) + img.channel(x1, y0, c) * ax;
    const double bottom = img.channel(x0, y1, c) * (1.0 - ax) + img.channel(x1, y1, c) * ax;
    out[static_cast<std::size_t>(c)] = top * (1.0 - ay) + bottom * ay;
  }
  return out;
}

void put(RgbImage& img, int x, int y, const Color& c) noexcept {
  img.set(x, y, {to_byte(c[0]), to_byte(c[1]), to_byte(c[2])});
}

double unit_uniform(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

double standard_normal(std::mt19937_64& rng) noexcept {
  const double u1 = 1.0 - unit_uniform(rng);  // (0, 1]
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidParameter, what);
}

RgbImage salt_pepper(const RgbImage& img, const SaltPepper& p, std::uint64_t seed) {
  if (!(p.density >= 0.0 && p.density <= 1.0)) invalid("salt & pepper density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  RgbImage out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool hit = unit_uniform(rng) < p.density;
      const bool white = (rng() & 1U) != 0;
      if (hit) out.set(x, y, white ? Rgb{255, 255, 255} : Rgb{0, 0, 0});
    }
  }
  return out;
}

RgbImage gaussian_noise(const RgbImage& img, const GaussianNoise& p, std::uint64_t seed) {
  if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) invalid("noise sigma must be nonnegative");
  std::mt19937_64 rng(seed);
  RgbImage out = img;
  for (auto& v : out.data()) v = to_byte(v + p.sigma * standard_normal(rng));
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  }
  return k;
}

RgbImage gaussian_blur(const RgbImage& img, const GaussianBlur& p) {
  if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) invalid("blur sigma must be nonnegative");
  if (p.sigma == 0.0) return img;
  const std::vector<double> kernel = gaussian_kernel(p.sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();

  // Taps falling outside the image are dropped and the rest renormalized.
  std::vector<double> pass(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Color acc{};
      double norm = 0.0;
      for (int t = std::max(-radius, -x); t <= std::min(radius, w - 1 - x); ++t) {
        const double wt = kernel[static_cast<std::size_t>(t + radius)];
        norm += wt;
        for (int c = 0; c < 3; ++c) acc[static_cast<std::size_t>(c)] += wt * img.channel(x + t, y, c);
      }
      const std::size_t base = (static_cast<std::size_t>(y) * w + x) * 3;
      for (std::size_t c = 0; c < 3; ++c) pass[base + c] = acc[c] / norm;
    }
  }
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Color acc{};
      double norm = 0.0;
      for (int t = std::max(-radius, -y); t <= std::min(radius, h - 1 - y); ++t) {
        const double wt = kernel[static_cast<std::size_t>(t + radius)];
        norm += wt;
        const std::size_t base = (static_cast<std::size_t>(y + t) * w + x) * 3;
        for (std::size_t c = 0; c < 3; ++c) acc[c] += wt * pass[base + c];
      }
      put(out, x, y, {acc[0] / norm, acc[1] / norm, acc[2] / norm});
    }
  }
  return out;
}

void check_window(const RgbImage& img, int width, int height, const char* what) {
  if (width < 1 || height < 1) invalid(std::string(what) + " window must be nonempty");
  if (width > img.width() || height > img.height()) {
    throw Error(ErrorKind::WindowOutOfBounds,
                std::string(what) + " window " + std::to_string(width) + "x" +
                    std::to_string(height) + " does not fit in " + std::to_string(img.width()) +
                    "x" + std::to_string(img.height()) + " image");
  }
}

RgbImage rotate(const RgbImage& img, const Rotate& p) {
  if (!std::isfinite(p.degrees)) invalid("rotation angle must be finite");
  check_window(img, p.crop, p.crop, "rotation crop");
  const double theta = p.degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  const double half = (p.crop - 1) / 2.0;
  RgbImage out(p.crop, p.crop);
  for (int j = 0; j < p.crop; ++j) {
    for (int i = 0; i < p.crop; ++i) {
      const double dx = i - half;
      const double dy = j - half;
      // inverse of a counter-clockwise turn in y-down pixel coordinates
      put(out, i, j, sample(img, cx + cs * dx - sn * dy, cy + sn * dx + cs * dy));
    }
  }
  return out;
}

RgbImage rotate90(const RgbImage& img) {
  const int w = img.width();
  RgbImage out(img.height(), w);
  for (int j = 0; j < out.height(); ++j) {
    for (int i = 0; i < out.width(); ++i) out.set(i, j, img.at(w - 1 - j, i));
  }
  return out;
}

RgbImage zoom(const RgbImage& img, const Zoom& p) {
  if (!(p.factor >= 1.0) || !std::isfinite(p.factor)) invalid("zoom factor must be >= 1");
  const double crop_w = img.width() / p.factor;
  const double crop_h = img.height() / p.factor;
  const double x0 = (img.width() - crop_w) / 2.0;
  const double y0 = (img.height() - crop_h) / 2.0;
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const double sy = y0 + (y + 0.5) / p.factor - 0.5;
    for (int x = 0; x < img.width(); ++x) {
      put(out, x, y, sample(img, x0 + (x + 0.5) / p.factor - 0.5, sy));
    }
  }
  return out;
}

RgbImage pan(const RgbImage& img, const Pan& p) {
  check_window(img, p.window, p.window, "pan");
  const int x0 = (img.width() - p.window) / 2 + p.dx;
  const int y0 = (img.height() - p.window) / 2;
  if (x0 < 0 || x0 + p.window > img.width()) {
    throw Error(ErrorKind::WindowOutOfBounds,
                "pan by " + std::to_string(p.dx) + " pixels leaves the frame");
  }
  RgbImage out(p.window, p.window);
  for (int y = 0; y < p.window; ++y) {
    for (int x = 0; x < p.window; ++x) out.set(x, y, img.at(x0 + x, y0 + y));
  }
  return out;
}

}  // namespace

RgbImage apply_distortion(const RgbImage& img, const DistortionSpec& spec) {
  return std::visit(
      [&](const auto& p) -> RgbImage {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SaltPepper>) return salt_pepper(img, p, spec.seed);
        else if constexpr (std::is_same_v<T, GaussianNoise>) return gaussian_noise(img, p, spec.seed);
        else if constexpr (std::is_same_v<T, GaussianBlur>) return gaussian_blur(img, p);
        else if constexpr (std::is_same_v<T, Rotate>) return rotate(img, p);
        else if constexpr (std::is_same_v<T, Rotate90>) return rotate90(img);
        else if constexpr (std::is_same_v<T, Zoom>) return zoom(img, p);
        else return pan(img, p);
      },
      spec.kind);
}

std::vector<std::string> distortion_names() {
  return {"salt-pepper", "gaussian-noise", "blur", "rotate", "rotate90", "zoom", "pan"};
}

DistortionSpec make_distortion(std::string_view name, double level, std::uint64_t seed) {
  if (name == "salt-pepper") return {SaltPepper{level}, seed};
  if (name == "gaussian-noise") return {GaussianNoise{level}, seed};
  if (name == "blur") return {GaussianBlur{level}, seed};
  if (name == "rotate") return {Rotate{level}, seed};
  if (name == "rotate90") return {Rotate90{}, seed};
  if (name == "zoom") return {Zoom{level}, seed};
  if (name == "pan") {
    if (level != std::floor(level) || !std::isfinite(level)) invalid("pan offset must be an integer");
    return {Pan{static_cast<int>(level)}, seed};
  }
  invalid("unknown distortion: " + std::string(name));
}

double neutral_level(std::string_view name) {
  make_distortion(name, 1.0);  // validates the name
  return name == "zoom" ? 1.0 : 0.0;
}

std::vector<double> default_grid(std::string_view name) {
  std::vector<double> grid;
  if (name == "salt-pepper") {
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  } else if (name == "gaussian-noise") {
    for (int i = 1; i <= 10; ++i) grid.push_back(5.0 * i);
  } else if (name == "blur") {
    grid = {0.5, 1, 1.5, 2, 3, 4, 5, 6, 8, 10, 12};
  } else if (name == "rotate") {
    for (int i = 0; i <= 10; ++i) grid.push_back(9.0 * i);
  } else if (name == "rotate90") {
    grid = {90};
  } else if (name == "zoom") {
    for (int i = 0; i <= 10; ++i) grid.push_back(1.0 + 0.1 * i);
  } else if (name == "pan") {
    for (int i = 0; i <= 8; ++i) grid.push_back(16.0 * i);
  } else {
    invalid("unknown distortion: " + std::string(name));
  }
  return grid;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace scssim
