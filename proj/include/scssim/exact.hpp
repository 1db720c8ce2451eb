#pragma once

#include <compare>
#include <cstdint>

namespace scssim {

__extension__ typedef __int128 Int128;
__extension__ typedef unsigned __int128 UInt128;

/// Nonnegative rational number with 128-bit numerator and denominator.
/// Ordering is exact (256-bit cross multiplication), so equal rationals
/// compare equal regardless of representation.
class ExactRatio {
 public:
  constexpr ExactRatio() = default;
  constexpr ExactRatio(UInt128 numerator, UInt128 denominator)
      : num_(numerator), den_(denominator) {}

  constexpr UInt128 numerator() const noexcept { return num_; }
  constexpr UInt128 denominator() const noexcept { return den_; }
  constexpr bool is_zero() const noexcept { return num_ == 0; }

  /// Nearest double, computed through extended precision; deterministic.
  double value() const noexcept {
    return static_cast<double>(static_cast<long double>(num_) /
                               static_cast<long double>(den_));
  }

  friend std::strong_ordering operator<=>(const ExactRatio& a, const ExactRatio& b) noexcept;
  friend bool operator==(const ExactRatio& a, const ExactRatio& b) noexcept {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  UInt128 num_ = 0;
  UInt128 den_ = 1;
};

}  // namespace scssim
