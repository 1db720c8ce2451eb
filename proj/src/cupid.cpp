#include "scssim/cupid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

#include "scssim/error.hpp"

namespace scssim {

namespace {

int extent_along(const Region& r, Axis axis) noexcept {
  return axis == Axis::Horizontal ? r.height() : r.width();
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::SchemaViolation, "invalid partition tree: " + what);
}

// Exact gain from the moments of the two halves.
Gain gain_from_parts(const RegionStats& first, const RegionStats& second) noexcept {
  const Int128 n1 = first.count;
  const Int128 n2 = second.count;
  UInt128 numerator = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    const Int128 d = n2 * first.sum[c] - n1 * second.sum[c];
    numerator += static_cast<UInt128>(d * d);
  }
  const UInt128 denominator = static_cast<UInt128>(n1 + n2) * static_cast<UInt128>(n1) *
                              static_cast<UInt128>(n2);
  return Gain(numerator, denominator);
}

RegionStats minus(const RegionStats& whole, const RegionStats& part) noexcept {
  RegionStats r;
  r.count = whole.count - part.count;
  for (std::size_t c = 0; c < 3; ++c) r.sum[c] = whole.sum[c] - part.sum[c];
  r.sum_sq = whole.sum_sq - part.sum_sq;
  return r;
}

struct ReplayStep {
  Region region;
  bool is_void = false;
  Region left;
  Region right;
};

// Region bookkeeping shared by apply_tree and leaf_regions.
std::vector<ReplayStep> replay(const CupidTree& tree, int width, int height) {
  const auto& nodes = tree.nodes();
  std::vector<ReplayStep> steps(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const CupidNode& node = nodes[i];
    ReplayStep& step = steps[i];
    if (node.parent < 0) {
      step.region = Region::full(width, height);
    } else {
      const ReplayStep& parent = steps[static_cast<std::size_t>(node.parent)];
      step.region = node.side == Side::Left ? parent.left : parent.right;
    }
    const int extent = extent_along(step.region, node.cut.axis);
    if (step.region.empty() || extent < 2) {
      step.is_void = true;
      step.left = step.region;
      step.right = Region{};
      continue;
    }
    // round(offset / parent_extent * extent) with halves rounded up, in integers
    const std::int64_t numer = 2 * static_cast<std::int64_t>(node.cut.offset) * extent +
                               node.cut.parent_extent;
    const std::int64_t mapped = numer / (2 * static_cast<std::int64_t>(node.cut.parent_extent));
    const int offset = static_cast<int>(std::clamp<std::int64_t>(mapped, 1, extent - 1));
    std::tie(step.left, step.right) = split_region(step.region, node.cut.axis, offset);
  }
  return steps;
}

}  // namespace

CupidTree::CupidTree(int source_width, int source_height, std::vector<CupidNode> nodes)
    : source_width_(source_width), source_height_(source_height), nodes_(std::move(nodes)) {
  if (source_width_ < 1 || source_height_ < 1 || source_width_ > kMaxImageExtent ||
      source_height_ > kMaxImageExtent) {
    schema_error("source dimensions out of range");
  }
  // Children of each node, to reject two nodes claiming the same slot.
  std::vector<std::array<bool, 2>> taken(nodes_.size(), {false, false});
  std::vector<std::pair<Region, Region>> children(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const CupidNode& node = nodes_[i];
    const std::string where = "cut " + std::to_string(i);
    if (node.cut.order != static_cast<int>(i) + 1) {
      schema_error(where + ": cuts must be listed in creation order");
    }
    if (!std::isfinite(node.cut.gain) || node.cut.gain < 0.0) {
      schema_error(where + ": gain must be finite and nonnegative");
    }
    Region region;
    if (i == 0) {
      if (node.parent != -1) schema_error("first cut must be the root");
      region = Region::full(source_width_, source_height_);
    } else {
      if (node.parent < 0 || node.parent >= static_cast<int>(i)) {
        schema_error(where + ": parent must reference an earlier cut");
      }
      auto& slot = taken[static_cast<std::size_t>(node.parent)][node.side == Side::Left ? 0 : 1];
      if (slot) schema_error(where + ": parent side already occupied");
      slot = true;
      const auto& parent_children = children[static_cast<std::size_t>(node.parent)];
      region = node.side == Side::Left ? parent_children.first : parent_children.second;
    }
    const int extent = extent_along(region, node.cut.axis);
    if (node.cut.parent_extent != extent) {
      schema_error(where + ": parent_extent does not match the replayed region");
    }
    if (node.cut.offset < 1 || node.cut.offset > extent - 1) {
      schema_error(where + ": offset outside [1, parent_extent-1]");
    }
    children[i] = split_region(region, node.cut.axis, node.cut.offset);
  }
}

std::vector<double> CupidTree::gains() const {
  std::vector<double> out;
  out.reserve(nodes_.size());
  for (const auto& node : nodes_) out.push_back(node.cut.gain);
  return out;
}

CupidTree CupidTree::prefix(int n) const {
  if (n < 0 || n > n_cuts()) {
    throw Error(ErrorKind::InvalidParameter,
                "tree has " + std::to_string(n_cuts()) + " cuts, " + std::to_string(n) + " requested");
  }
  return CupidTree(source_width_, source_height_,
                   std::vector<CupidNode>(nodes_.begin(), nodes_.begin() + n));
}

std::pair<Region, Region> split_region(const Region& r, Axis axis, int offset) noexcept {
  if (axis == Axis::Horizontal) {
    return {{r.x0, r.y0, r.x1, r.y0 + offset}, {r.x0, r.y0 + offset, r.x1, r.y1}};
  }
  return {{r.x0, r.y0, r.x0 + offset, r.y1}, {r.x0 + offset, r.y0, r.x1, r.y1}};
}

Gain cut_gain(const IntegralSums& sums, const Region& region, Axis axis, int offset) {
  const RegionStats whole = sums.stats(region);
  const int extent = extent_along(region, axis);
  if (offset < 1 || offset > extent - 1) {
    throw Error(ErrorKind::InvalidParameter, "cut offset outside region");
  }
  const RegionStats first = sums.stats_unchecked(split_region(region, axis, offset).first);
  return gain_from_parts(first, minus(whole, first));
}

std::optional<CutChoice> best_cut(const IntegralSums& sums, const Region& region) {
  const RegionStats whole = sums.stats(region);
  std::optional<CutChoice> best;
  for (const Axis axis : {Axis::Horizontal, Axis::Vertical}) {
    const int extent = extent_along(region, axis);
    for (int offset = 1; offset < extent; ++offset) {
      const RegionStats first = sums.stats_unchecked(split_region(region, axis, offset).first);
      const Gain g = gain_from_parts(first, minus(whole, first));
      if (!best || g > best->gain) best = CutChoice{axis, offset, g};
    }
  }
  return best;
}

CupidTree build_tree(const IntegralSums& sums, int n_cuts) {
  if (n_cuts < 1) {
    throw Error(ErrorKind::InvalidParameter, "number of cuts must be at least 1");
  }
  const std::int64_t pixels = static_cast<std::int64_t>(sums.width()) * sums.height();
  if (pixels < static_cast<std::int64_t>(n_cuts) + 1) {
    throw Error(ErrorKind::ImageTooSmall,
                std::to_string(sums.width()) + "x" + std::to_string(sums.height()) +
                    " image cannot hold " + std::to_string(n_cuts + 1) + " partitions");
  }

  struct Leaf {
    Region region;
    int parent;
    Side side;
    std::int64_t created;
    CutChoice cut;
  };
  // Max-heap on gain; among equal gains the earliest-created leaf wins.
  const auto lower_priority = [](const Leaf& a, const Leaf& b) {
    const auto order = a.cut.gain <=> b.cut.gain;
    if (order != 0) return order < 0;
    return a.created > b.created;
  };
  std::priority_queue<Leaf, std::vector<Leaf>, decltype(lower_priority)> frontier(lower_priority);

  std::int64_t created = 0;
  const auto add_leaf = [&](const Region& region, int parent, Side side) {
    const std::int64_t id = created++;
    if (auto cut = best_cut(sums, region)) frontier.push(Leaf{region, parent, side, id, *cut});
  };

  add_leaf(Region::full(sums.width(), sums.height()), -1, Side::Left);
  std::vector<CupidNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n_cuts));
  while (static_cast<int>(nodes.size()) < n_cuts) {
    // Nonempty by the pixel-count precondition: every step adds one leaf
    // and only 1x1 leaves leave the frontier.
    const Leaf leaf = frontier.top();
    frontier.pop();
    const int index = static_cast<int>(nodes.size());
    nodes.push_back(CupidNode{
        Cut{leaf.cut.axis, leaf.cut.offset, extent_along(leaf.region, leaf.cut.axis),
            leaf.cut.gain.value(), index + 1},
        leaf.parent, leaf.side});
    const auto [first, second] = split_region(leaf.region, leaf.cut.axis, leaf.cut.offset);
    add_leaf(first, index, Side::Left);
    add_leaf(second, index, Side::Right);
  }
  return CupidTree(sums.width(), sums.height(), std::move(nodes));
}

CupidTree build_tree(const RgbImage& img, int n_cuts) {
  return build_tree(IntegralSums(img), n_cuts);
}

GainSeq apply_tree(const CupidTree& tree, const IntegralSums& target) {
  GainSeq out;
  out.total_sse = region_sse(target, Region::full(target.width(), target.height()));
  const std::vector<ReplayStep> steps = replay(tree, target.width(), target.height());
  out.gains.reserve(steps.size());
  for (const ReplayStep& step : steps) {
    if (step.is_void) {
      out.gains.push_back(0.0);
      continue;
    }
    const RegionStats first = target.stats_unchecked(step.left);
    const RegionStats second = target.stats_unchecked(step.right);
    out.gains.push_back(gain_from_parts(first, second).value());
  }
  return out;
}

std::vector<Region> leaf_regions(const CupidTree& tree, int width, int height) {
  const std::vector<ReplayStep> steps = replay(tree, width, height);
  const auto& nodes = tree.nodes();
  std::vector<std::array<bool, 2>> has_child(nodes.size(), {false, false});
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    has_child[static_cast<std::size_t>(nodes[i].parent)][nodes[i].side == Side::Left ? 0 : 1] = true;
  }
  std::vector<Region> leaves;
  if (nodes.empty()) {
    leaves.push_back(Region::full(width, height));
    return leaves;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!has_child[i][0] && !steps[i].left.empty()) leaves.push_back(steps[i].left);
    if (!has_child[i][1] && !steps[i].right.empty()) leaves.push_back(steps[i].right);
  }
  return leaves;
}

}  // namespace scssim
