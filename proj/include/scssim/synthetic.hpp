#pragma once

#include <cstdint>

#include "scssim/image.hpp"

namespace scssim::synthetic {

/// Outdoor scene with a strong horizon near mid-height: sky, an irregular
/// tree line stepping up onto a hill right of centre, and water with a
/// reflection. `angle_degrees` rotates the whole
/// layout counter-clockwise about the frame centre without cropping, so
/// scenes at different angles share every other property.
RgbImage landscape(int width, int height, std::uint64_t seed, double angle_degrees = 0.0);

/// Unstructured i.i.d. uniform RGB noise.
RgbImage random_image(int width, int height, std::uint64_t seed);

/// Two flat bands split at `split` rows from the top (horizontal) or columns
/// from the left.
RgbImage two_bands(int width, int height, int split, bool horizontal, Rgb first, Rgb second);

}  // namespace scssim::synthetic
