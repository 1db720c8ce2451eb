#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <memory>

#include "scssim/exact.hpp"
#include "scssim/image.hpp"

namespace scssim {

/// Exact first- and second-order moments of a rectangle.
struct RegionStats {
  std::int64_t count = 0;
  std::array<std::int64_t, 3> sum{};  // per channel
  std::uint64_t sum_sq = 0;           // sum of r^2 + g^2 + b^2
};

/// Summed-area tables over an RgbImage: per-channel value sums and the sum
/// of squared pixel norms. Entry (x, y) covers every pixel with coordinates
/// strictly less than (x, y); row 0 and column 0 are zero.
class IntegralSums {
 public:
  explicit IntegralSums(const RgbImage& img);

  IntegralSums(IntegralSums&&) noexcept = default;
  IntegralSums& operator=(IntegralSums&&) noexcept = default;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::int64_t value_sum(int channel, int x, int y) const noexcept {
    return cells_[index(x, y)].sum[static_cast<std::size_t>(channel)];
  }
  std::uint64_t squared_sum(int x, int y) const noexcept { return cells_[index(x, y)].sum_sq; }

  /// O(1) moments of `region`; throws RegionOutOfBounds.
  RegionStats stats(const Region& region) const;

  /// Same as stats() without the bounds check.
  RegionStats stats_unchecked(const Region& region) const noexcept;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) +
           static_cast<std::size_t>(x);
  }

  // All four tables interleaved so a corner lookup touches one cache line.
  struct alignas(32) Cell {
    std::array<std::int64_t, 3> sum;
    std::uint64_t sum_sq;
  };

  struct FreeCells {
    std::size_t bytes;
    void operator()(Cell* p) const noexcept;
  };

  int width_;
  int height_;
  std::unique_ptr<Cell[], FreeCells> cells_;
};

inline IntegralSums build_integral(const RgbImage& img) { return IntegralSums(img); }

/// n * SSE as an exact integer: n * sum||p||^2 - ||sum p||^2.
UInt128 scaled_sse(const RegionStats& stats) noexcept;

/// Sum of squared deviations from the region mean, over all three channels.
double region_sse(const IntegralSums& sums, const Region& region);

}  // namespace scssim
