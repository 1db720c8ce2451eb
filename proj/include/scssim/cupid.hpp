#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scssim/exact.hpp"
#include "scssim/image.hpp"
#include "scssim/integral.hpp"

namespace scssim {

/// Horizontal cuts split a region into top/bottom, vertical into left/right.
enum class Axis { Horizontal, Vertical };

/// Left child = left (vertical cut) or top (horizontal cut) partition.
enum class Side { Left, Right };

/// Exact SSE reduction e - (e1 + e2) of a straight cut, kept as a rational.
using Gain = ExactRatio;

struct CutChoice {
  Axis axis;
  int offset;  // pixels from the region's top or left edge, in [1, extent-1]
  Gain gain;
};

struct Cut {
  Axis axis = Axis::Horizontal;
  int offset = 1;
  int parent_extent = 2;  // region height (horizontal) or width (vertical)
  double gain = 0.0;
  int order = 1;  // 1-based creation index

  friend bool operator==(const Cut&, const Cut&) = default;
};

struct CupidNode {
  Cut cut;
  int parent = -1;  // index into the node list, -1 for the root
  Side side = Side::Left;

  friend bool operator==(const CupidNode&, const CupidNode&) = default;
};

/// Binary partition tree: internal nodes in greedy creation order.
class CupidTree {
 public:
  /// Validates the structure against the source dimensions; throws
  /// SchemaViolation on any inconsistency.
  CupidTree(int source_width, int source_height, std::vector<CupidNode> nodes);

  int source_width() const noexcept { return source_width_; }
  int source_height() const noexcept { return source_height_; }
  const std::vector<CupidNode>& nodes() const noexcept { return nodes_; }
  int n_cuts() const noexcept { return static_cast<int>(nodes_.size()); }

  /// Gains as recorded on the source image, in creation order.
  std::vector<double> gains() const;

  /// The first `n` cuts. A greedy prefix is itself the greedy tree of n cuts.
  CupidTree prefix(int n) const;

  friend bool operator==(const CupidTree&, const CupidTree&) = default;

 private:
  int source_width_;
  int source_height_;
  std::vector<CupidNode> nodes_;
};

/// Per-cut gains of a tree replayed on some target image.
struct GainSeq {
  double total_sse = 0.0;
  std::vector<double> gains;
};

/// Top/left and bottom/right halves of `region` at `offset`.
std::pair<Region, Region> split_region(const Region& region, Axis axis, int offset) noexcept;

/// Gain of one cut, via g = ||n2*S1 - n1*S2||^2 / (n*n1*n2), which equals
/// e - (e1 + e2) exactly.
Gain cut_gain(const IntegralSums& sums, const Region& region, Axis axis, int offset);

/// Maximum-gain straight cut of `region`. Horizontal candidates are scanned
/// top to bottom, then vertical left to right; the first maximum wins.
/// Returns nullopt for a 1x1 region.
std::optional<CutChoice> best_cut(const IntegralSums& sums, const Region& region);

/// Greedy construction: repeatedly split the leaf whose best cut has the
/// largest gain (ties go to the earliest-created leaf).
CupidTree build_tree(const IntegralSums& sums, int n_cuts);
CupidTree build_tree(const RgbImage& img, int n_cuts);

/// Replays `tree` on a target image of any size. Offsets are mapped
/// proportionally (round half up, clamped to [1, extent-1]); a cut that has
/// no legal position is void, contributes zero gain, and sends the whole
/// region to its left child.
GainSeq apply_tree(const CupidTree& tree, const IntegralSums& target);

/// Nonempty leaf regions produced by replaying `tree` on a width x height
/// frame.
std::vector<Region> leaf_regions(const CupidTree& tree, int width, int height);

std::string tree_to_json(const CupidTree& tree);
CupidTree tree_from_json(std::string_view text);

}  // namespace scssim
