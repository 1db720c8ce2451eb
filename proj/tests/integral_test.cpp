#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "scssim/error.hpp"
#include "scssim/integral.hpp"

namespace scssim {
namespace {

TEST(IntegralSums, SinglePixel) {
  RgbImage img(1, 1, Rgb{2, 3, 4});
  const IntegralSums s(img);
  EXPECT_EQ(s.value_sum(0, 1, 1), 2);
  EXPECT_EQ(s.value_sum(1, 1, 1), 3);
  EXPECT_EQ(s.value_sum(2, 1, 1), 4);
  EXPECT_EQ(s.squared_sum(1, 1), 29u);
  EXPECT_EQ(s.squared_sum(0, 1), 0u);
  EXPECT_EQ(s.value_sum(0, 1, 0), 0);
}

TEST(IntegralSums, AllZero) {
  const IntegralSums s(RgbImage(5, 3));
  for (int y = 0; y <= 3; ++y)
    for (int x = 0; x <= 5; ++x) {
      EXPECT_EQ(s.squared_sum(x, y), 0u);
      for (int c = 0; c < 3; ++c) EXPECT_EQ(s.value_sum(c, x, y), 0);
    }
}

TEST(IntegralSums, MatchesDoubleLoop) {
  std::mt19937_64 rng(8);
  const RgbImage img = oracle::random_image(rng, 8, 8, false);
  const IntegralSums s(img);
  for (int y = 0; y <= 8; ++y)
    for (int x = 0; x <= 8; ++x) {
      std::int64_t sum[3] = {0, 0, 0};
      std::uint64_t sq = 0;
      for (int yy = 0; yy < y; ++yy)
        for (int xx = 0; xx < x; ++xx)
          for (int c = 0; c < 3; ++c) {
            const std::uint64_t v = img.channel(xx, yy, c);
            sum[c] += static_cast<std::int64_t>(v);
            sq += v * v;
          }
      for (int c = 0; c < 3; ++c) EXPECT_EQ(s.value_sum(c, x, y), sum[c]);
      EXPECT_EQ(s.squared_sum(x, y), sq);
    }
}

TEST(IntegralSums, MonotoneAlongRowsAndColumns) {
  std::mt19937_64 rng(9);
  const RgbImage img = oracle::random_image(rng, 13, 11, false);
  const IntegralSums s(img);
  for (int y = 1; y <= 11; ++y)
    for (int x = 1; x <= 13; ++x) {
      EXPECT_GE(s.squared_sum(x, y), s.squared_sum(x - 1, y));
      EXPECT_GE(s.squared_sum(x, y), s.squared_sum(x, y - 1));
      for (int c = 0; c < 3; ++c) {
        EXPECT_GE(s.value_sum(c, x, y), s.value_sum(c, x - 1, y));
        EXPECT_GE(s.value_sum(c, x, y), s.value_sum(c, x, y - 1));
      }
    }
}

TEST(IntegralSums, RegionStatsMatchCropFromShiftedOrigin) {
  std::mt19937_64 rng(10);
  const RgbImage img = oracle::random_image(rng, 20, 17, false);
  const IntegralSums full(img);
  std::uniform_int_distribution<int> ux(0, 19), uy(0, 16);
  for (int t = 0; t < 200; ++t) {
    int x0 = ux(rng), x1 = ux(rng), y0 = uy(rng), y1 = uy(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    ++x1;
    ++y1;
    RgbImage crop(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) crop.set(x - x0, y - y0, img.at(x, y));
    const IntegralSums shifted(crop);
    const RegionStats a = full.stats({x0, y0, x1, y1});
    const RegionStats b = shifted.stats(Region::full(crop.width(), crop.height()));
    EXPECT_EQ(a.count, b.count);
    EXPECT_EQ(a.sum, b.sum);
    EXPECT_EQ(a.sum_sq, b.sum_sq);
  }
}

TEST(IntegralSums, RecycledTablesHoldFreshValues) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 4; ++round) {
    const RgbImage img = oracle::random_image(rng, 700, 500, round % 2 == 0);
    const IntegralSums s(img);
    std::uniform_int_distribution<int> ux(0, 699), uy(0, 499);
    for (int k = 0; k < 20; ++k) {
      const int x = ux(rng), y = uy(rng);
      const Region r{x, y, std::min(700, x + 9), std::min(500, y + 7)};
      const RegionStats st = s.stats(r);
      std::int64_t sum[3] = {0, 0, 0};
      for (int yy = r.y0; yy < r.y1; ++yy)
        for (int xx = r.x0; xx < r.x1; ++xx)
          for (int c = 0; c < 3; ++c) sum[c] += img.channel(xx, yy, c);
      for (int c = 0; c < 3; ++c) EXPECT_EQ(st.sum[static_cast<std::size_t>(c)], sum[c]);
    }
    EXPECT_EQ(s.value_sum(0, 700, 500), [&] {
      std::int64_t t = 0;
      for (int yy = 0; yy < 500; ++yy)
        for (int xx = 0; xx < 700; ++xx) t += img.channel(xx, yy, 0);
      return t;
    }());
  }
}

TEST(IntegralSums, StatsRejectsBadRegions) {
  const IntegralSums s(RgbImage(4, 4));
  EXPECT_THROW(s.stats({0, 0, 5, 4}), Error);
  EXPECT_THROW(s.stats({-1, 0, 2, 2}), Error);
  EXPECT_THROW(s.stats({2, 2, 2, 3}), Error);
  try {
    s.stats({0, 0, 4, 5});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RegionOutOfBounds);
  }
}

TEST(RegionSse, UniformIsZero) {
  const IntegralSums s(RgbImage(6, 4, Rgb{12, 200, 77}));
  EXPECT_EQ(region_sse(s, Region::full(6, 4)), 0.0);
  EXPECT_EQ(region_sse(s, {1, 1, 3, 4}), 0.0);
}

TEST(RegionSse, OneByTwo) {
  RgbImage img(2, 1);
  img.set(1, 0, Rgb{2, 2, 2});
  EXPECT_EQ(region_sse(IntegralSums(img), Region::full(2, 1)), 6.0);
}

TEST(RegionSse, MatchesMeanDeviationOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const RgbImage img = oracle::random_image(rng, 12, 9, t % 2 == 1);
    const IntegralSums s(img);
    const Region r = Region::full(12, 9);
    const double expect = oracle::sse_double(img, r);
    EXPECT_NEAR(region_sse(s, r), expect, 1e-6 * expect);
    EXPECT_NEAR(region_sse(s, r), static_cast<double>(oracle::sse(img, r).value()), 1e-9 * expect);
  }
}

TEST(RegionSse, ExtremeContrastIsExact) {
  RgbImage img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if ((x + y) % 2) img.set(x, y, Rgb{255, 255, 255});
  EXPECT_EQ(region_sse(IntegralSums(img), Region::full(64, 64)), 4096 * 3 * 127.5 * 127.5);
}

TEST(RegionSse, SplitNeverIncreasesError) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> size(2, 24);
  int checked = 0;
  while (checked < 1000) {
    const int w = size(rng), h = size(rng);
    const RgbImage img = oracle::random_image(rng, w, h, checked % 3 == 0);
    const IntegralSums s(img);
    for (int k = 0; k < 10; ++k, ++checked) {
      std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1);
      int x0 = ux(rng), x1 = ux(rng), y0 = uy(rng), y1 = uy(rng);
      if (x0 > x1) std::swap(x0, x1);
      if (y0 > y1) std::swap(y0, y1);
      const Region r{x0, y0, x1 + 1, y1 + 1};
      if (r.width() < 2 && r.height() < 2) continue;
      const bool horizontal = r.height() >= 2 && (r.width() < 2 || rng() % 2 == 0);
      const int extent = horizontal ? r.height() : r.width();
      const int off = std::uniform_int_distribution<int>(1, extent - 1)(rng);
      const auto [a, b] = oracle::halves(r, horizontal ? Axis::Horizontal : Axis::Vertical, off);
      const double e = region_sse(s, r);
      EXPECT_LE(region_sse(s, a) + region_sse(s, b), e * (1 + 1e-12) + 1e-9);
    }
  }
}

}  // namespace
}  // namespace scssim
