#include "scssim/integral.hpp"

#include <mutex>
#include <new>
#include <utility>
#include <vector>
#include <string>

#if defined(__linux__)
#include <sys/mman.h>
#endif

#include "scssim/error.hpp"

namespace scssim {

namespace {

constexpr std::size_t kHugePage = std::size_t{1} << 21;
constexpr std::size_t kPoolSlots = 8;
constexpr std::size_t kPoolBytes = std::size_t{256} << 20;

std::size_t table_bytes(std::size_t bytes) {
  const std::size_t align = bytes >= kHugePage ? kHugePage : 64;
  return (bytes + align - 1) / align * align;
}

// Recently released large tables. Reusing one skips the page faults and
// kernel zeroing of a fresh mapping.
struct TablePool {
  std::mutex mutex;
  std::vector<std::pair<std::size_t, void*>> free;
  std::size_t held = 0;

  ~TablePool() {
    for (auto& [bytes, p] : free) std::free(p);
  }
};

TablePool& pool() {
  static TablePool instance;
  return instance;
}

void* allocate_table(std::size_t bytes) {
  const std::size_t rounded = table_bytes(bytes);
  if (rounded >= kHugePage) {
    TablePool& tp = pool();
    std::lock_guard lock(tp.mutex);
    for (auto it = tp.free.begin(); it != tp.free.end(); ++it) {
      if (it->first == rounded) {
        void* p = it->second;
        tp.held -= rounded;
        tp.free.erase(it);
        return p;
      }
    }
  }
  // Tables of a few megabytes and up are page-fault bound on first touch;
  // 2 MiB alignment lets the kernel back them with transparent huge pages.
  void* p = std::aligned_alloc(rounded >= kHugePage ? kHugePage : 64, rounded);
  if (p == nullptr) throw std::bad_alloc();
#if defined(__linux__) && defined(MADV_HUGEPAGE)
  if (rounded >= kHugePage) madvise(p, rounded, MADV_HUGEPAGE);
#endif
  return p;
}

void release_table(void* p, std::size_t bytes) noexcept {
  const std::size_t rounded = table_bytes(bytes);
  if (rounded >= kHugePage && rounded <= kPoolBytes) {
    TablePool& tp = pool();
    std::lock_guard lock(tp.mutex);
    while (!tp.free.empty() &&
           (tp.free.size() >= kPoolSlots || tp.held + rounded > kPoolBytes)) {
      tp.held -= tp.free.front().first;
      std::free(tp.free.front().second);
      tp.free.erase(tp.free.begin());
    }
    tp.free.emplace_back(rounded, p);
    tp.held += rounded;
    return;
  }
  std::free(p);
}

}  // namespace

void IntegralSums::FreeCells::operator()(Cell* p) const noexcept { release_table(p, bytes); }

IntegralSums::IntegralSums(const RgbImage& img) : width_(img.width()), height_(img.height()) {
  const std::size_t cells = static_cast<std::size_t>(width_ + 1) * static_cast<std::size_t>(height_ + 1);
  cells_ = std::unique_ptr<Cell[], FreeCells>(static_cast<Cell*>(allocate_table(cells * sizeof(Cell))),
                                              FreeCells{cells * sizeof(Cell)});
  const std::size_t stride = static_cast<std::size_t>(width_) + 1;
  Cell* row = cells_.get();
  for (std::size_t x = 0; x < stride; ++x) row[x] = Cell{{0, 0, 0}, 0};

  const std::uint8_t* px = img.data().data();
  for (int y = 0; y < height_; ++y) {
    const Cell* above = row;
    row += stride;
    row[0] = Cell{{0, 0, 0}, 0};
    std::int64_t r = 0, g = 0, b = 0;
    std::uint64_t sq = 0;
    for (std::size_t x = 1; x < stride; ++x, px += 3) {
      const std::int64_t pr = px[0], pg = px[1], pb = px[2];
      r += pr;
      g += pg;
      b += pb;
      sq += static_cast<std::uint64_t>(pr * pr + pg * pg + pb * pb);
      const Cell up = above[x];
      row[x] = Cell{{up.sum[0] + r, up.sum[1] + g, up.sum[2] + b}, up.sum_sq + sq};
    }
  }
}

RegionStats IntegralSums::stats_unchecked(const Region& r) const noexcept {
  const Cell& a = cells_[index(r.x0, r.y0)];
  const Cell& b = cells_[index(r.x1, r.y0)];
  const Cell& c = cells_[index(r.x0, r.y1)];
  const Cell& d = cells_[index(r.x1, r.y1)];
  RegionStats s;
  s.count = r.area();
  for (std::size_t ch = 0; ch < 3; ++ch) s.sum[ch] = d.sum[ch] - b.sum[ch] - c.sum[ch] + a.sum[ch];
  s.sum_sq = d.sum_sq - b.sum_sq - c.sum_sq + a.sum_sq;
  return s;
}

RegionStats IntegralSums::stats(const Region& r) const {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > width_ || r.y1 > height_ || r.empty()) {
    throw Error(ErrorKind::RegionOutOfBounds,
                "region [" + std::to_string(r.x0) + "," + std::to_string(r.x1) + ")x[" +
                    std::to_string(r.y0) + "," + std::to_string(r.y1) + ") outside " +
                    std::to_string(width_) + "x" + std::to_string(height_) + " image");
  }
  return stats_unchecked(r);
}

UInt128 scaled_sse(const RegionStats& s) noexcept {
  UInt128 norm_sq = 0;
  for (const std::int64_t v : s.sum) {
    norm_sq += static_cast<UInt128>(static_cast<Int128>(v) * v);
  }
  // Cauchy-Schwarz guarantees n * sum_sq >= ||sum||^2 exactly.
  return static_cast<UInt128>(s.count) * s.sum_sq - norm_sq;
}

double region_sse(const IntegralSums& sums, const Region& region) {
  const RegionStats s = sums.stats(region);
  return ExactRatio(scaled_sse(s), static_cast<UInt128>(s.count)).value();
}

}  // namespace scssim
