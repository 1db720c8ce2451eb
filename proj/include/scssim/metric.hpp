#pragma once

#include <optional>
#include <vector>

#include "scssim/cupid.hpp"
#include "scssim/image.hpp"
#include "scssim/integral.hpp"

namespace scssim {

struct MetricConfig {
  int n_cuts = 64;
  double lambda = 25.0;
  /// Floor applied to curve values before taking logarithms.
  double curve_floor = 1e-9;

  /// Throws InvalidParameter unless n_cuts >= 1, lambda > 0, 0 < floor < 1.
  void validate() const;
};

/// Normalized cumulative gains c_1..c_N; nondecreasing, within [0, 1].
struct GainCurve {
  std::vector<double> values;
};

/// c_i = (g_1 + ... + g_i) / total_sse for i = 1..n.
/// Throws DegenerateImage when total_sse is zero.
GainCurve cumulative_curve(const GainSeq& seq, int n);

/// exp(-lambda * k^2), never below the smallest positive normal double.
double decay_similarity(double mean_log_ratio, double lambda);

/// An image with its summed-area tables and its own greedy tree, so that
/// repeated comparisons do not rebuild either.
class PreparedImage {
 public:
  PreparedImage(const RgbImage& img, int n_cuts);
  /// Uses a precomputed tree (at least n_cuts cuts, matching dimensions).
  PreparedImage(const RgbImage& img, const CupidTree& tree, int n_cuts);

  int width() const noexcept { return sums_.width(); }
  int height() const noexcept { return sums_.height(); }
  const IntegralSums& sums() const noexcept { return sums_; }
  const CupidTree& tree() const noexcept { return tree_; }
  double total_sse() const noexcept { return total_sse_; }

 private:
  IntegralSums sums_;
  CupidTree tree_;
  double total_sse_;
};

struct DirectionalResult {
  double similarity = 1.0;      // M
  double mean_log_ratio = 0.0;  // mean of k_i
  GainCurve reference_curve;    // c0: reference tree on the reference
  GainCurve test_curve;         // c: test tree on the reference
};

/// M(test, reference): how well the test image's tree explains the
/// reference compared with the reference's own tree.
DirectionalResult directional_similarity(const PreparedImage& test,
                                         const PreparedImage& reference,
                                         const MetricConfig& cfg);
double directional_similarity(const RgbImage& test, const RgbImage& reference,
                              const MetricConfig& cfg);

struct ScssimResult {
  double score = 1.0;
  DirectionalResult a_vs_b;  // test a, reference b
  DirectionalResult b_vs_a;  // test b, reference a
};

/// Symmetric average of the two directional similarities.
ScssimResult scssim_detailed(const PreparedImage& a, const PreparedImage& b,
                             const MetricConfig& cfg);
double scssim(const PreparedImage& a, const PreparedImage& b, const MetricConfig& cfg);
double scssim(const RgbImage& a, const RgbImage& b, const MetricConfig& cfg = {});

}  // namespace scssim
