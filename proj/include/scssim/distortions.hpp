#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scssim/image.hpp"

namespace scssim {

inline constexpr int kRotateCrop = 362;
inline constexpr int kPanWindow = 512;

struct SaltPepper { double density = 0.0; };
struct GaussianNoise { double sigma = 0.0; };  // 0-255 scale
struct GaussianBlur { double sigma = 0.0; };
struct Rotate { double degrees = 0.0; int crop = kRotateCrop; };  // counter-clockwise
struct Rotate90 {};                                               // counter-clockwise
struct Zoom { double factor = 1.0; };
struct Pan { int dx = 0; int window = kPanWindow; };

using Distortion = std::variant<SaltPepper, GaussianNoise, GaussianBlur, Rotate, Rotate90, Zoom, Pan>;

struct DistortionSpec {
  Distortion kind;
  std::uint64_t seed = 0;  // noise kinds only
};

/// Deterministic: the same image, spec and seed give byte-identical output.
/// Noise is drawn from std::mt19937_64 seeded with `seed`.
/// Throws InvalidParameter or WindowOutOfBounds.
RgbImage apply_distortion(const RgbImage& img, const DistortionSpec& spec);

/// Names accepted on the command line: salt-pepper, gaussian-noise, blur,
/// rotate, rotate90, zoom, pan.
std::vector<std::string> distortion_names();

/// Builds a spec from a kind name and its single scalar level (density,
/// sigma, degrees, factor or dx; ignored for rotate90).
DistortionSpec make_distortion(std::string_view name, double level, std::uint64_t seed = 0);

/// The level at which `name` leaves the composition untouched (the sweep
/// baseline): 0 for noise, blur, rotation and pan; 1 for zoom.
double neutral_level(std::string_view name);

/// Default sweep grid for `name`.
std::vector<double> default_grid(std::string_view name);

/// Independent stream per sweep level, derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace scssim
