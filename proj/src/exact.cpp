#include "scssim/exact.hpp"

namespace scssim {

namespace {

struct UInt256 {
  UInt128 hi;
  UInt128 lo;
};

UInt256 multiply(UInt128 a, UInt128 b) noexcept {
  constexpr UInt128 kMask = ~std::uint64_t{0};
  const UInt128 a_lo = a & kMask, a_hi = a >> 64;
  const UInt128 b_lo = b & kMask, b_hi = b >> 64;

  const UInt128 ll = a_lo * b_lo;
  const UInt128 lh = a_lo * b_hi;
  const UInt128 hl = a_hi * b_lo;
  const UInt128 hh = a_hi * b_hi;

  // middle = carry-in from ll plus the low halves of the cross terms
  const UInt128 middle = (ll >> 64) + (lh & kMask) + (hl & kMask);
  UInt256 r;
  r.lo = (middle << 64) | (ll & kMask);
  r.hi = hh + (lh >> 64) + (hl >> 64) + (middle >> 64);
  return r;
}

}  // namespace

std::strong_ordering operator<=>(const ExactRatio& a, const ExactRatio& b) noexcept {
  const UInt256 left = multiply(a.num_, b.den_);
  const UInt256 right = multiply(b.num_, a.den_);
  if (left.hi != right.hi) return left.hi < right.hi ? std::strong_ordering::less : std::strong_ordering::greater;
  if (left.lo != right.lo) return left.lo < right.lo ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace scssim
