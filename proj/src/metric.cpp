#include "scssim/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "scssim/error.hpp"

namespace scssim {

void MetricConfig::validate() const {
  if (n_cuts < 1) throw Error(ErrorKind::InvalidParameter, "cut count must be at least 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidParameter, "lambda must be positive and finite");
  }
  if (!(curve_floor > 0.0 && curve_floor < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "curve floor must lie in (0, 1)");
  }
}

GainCurve cumulative_curve(const GainSeq& seq, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > seq.gains.size()) {
    throw Error(ErrorKind::InvalidParameter,
                "gain sequence has " + std::to_string(seq.gains.size()) + " entries, " +
                    std::to_string(n) + " requested");
  }
  if (!(seq.total_sse > 0.0)) {
    throw Error(ErrorKind::DegenerateImage, "reference image is uniform (zero total SSE)");
  }
  GainCurve curve;
  curve.values.reserve(static_cast<std::size_t>(n));
  double running = 0.0;
  for (int i = 0; i < n; ++i) {
    running += seq.gains[static_cast<std::size_t>(i)];
    const double c = running / seq.total_sse;
    // Telescoping bound.
    if (c > 1.0 + 1e-9 || c < 0.0 || (!curve.values.empty() && c < curve.values.back() - 1e-12)) {
      throw std::logic_error("cumulative gain curve left [0, 1] or decreased");
    }
    curve.values.push_back(c);
  }
  return curve;
}

double decay_similarity(double mean_log_ratio, double lambda) {
  // The exact value is always positive; keep it representable.
  return std::max(std::exp(-lambda * mean_log_ratio * mean_log_ratio),
                  std::numeric_limits<double>::min());
}

PreparedImage::PreparedImage(const RgbImage& img, int n_cuts)
    : sums_(img),
      tree_(build_tree(sums_, n_cuts)),
      total_sse_(region_sse(sums_, Region::full(sums_.width(), sums_.height()))) {}

PreparedImage::PreparedImage(const RgbImage& img, const CupidTree& tree, int n_cuts)
    : sums_(img),
      tree_(tree.n_cuts() >= n_cuts ? tree.prefix(n_cuts)
                                    : throw Error(ErrorKind::InvalidParameter,
                                                  "precomputed tree has too few cuts")),
      total_sse_(region_sse(sums_, Region::full(sums_.width(), sums_.height()))) {
  if (tree.source_width() != img.width() || tree.source_height() != img.height()) {
    throw Error(ErrorKind::InvalidParameter, "precomputed tree was built for a different image size");
  }
}

DirectionalResult directional_similarity(const PreparedImage& test,
                                         const PreparedImage& reference,
                                         const MetricConfig& cfg) {
  cfg.validate();
  if (reference.tree().n_cuts() < cfg.n_cuts || test.tree().n_cuts() < cfg.n_cuts) {
    throw Error(ErrorKind::InvalidParameter, "prepared trees have fewer cuts than configured");
  }
  if (!(reference.total_sse() > 0.0)) {
    throw Error(ErrorKind::DegenerateImage, "reference image is uniform (zero total SSE)");
  }
  DirectionalResult r;
  r.reference_curve = cumulative_curve(apply_tree(reference.tree(), reference.sums()), cfg.n_cuts);
  r.test_curve = cumulative_curve(apply_tree(test.tree(), reference.sums()), cfg.n_cuts);

  double sum = 0.0;
  for (int i = 0; i < cfg.n_cuts; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    sum += std::log(std::max(r.test_curve.values[idx], cfg.curve_floor)) -
           std::log(std::max(r.reference_curve.values[idx], cfg.curve_floor));
  }
  r.mean_log_ratio = sum / cfg.n_cuts;
  r.similarity = decay_similarity(r.mean_log_ratio, cfg.lambda);
  return r;
}

double directional_similarity(const RgbImage& test, const RgbImage& reference,
                              const MetricConfig& cfg) {
  cfg.validate();
  return directional_similarity(PreparedImage(test, cfg.n_cuts),
                                PreparedImage(reference, cfg.n_cuts), cfg)
      .similarity;
}

ScssimResult scssim_detailed(const PreparedImage& a, const PreparedImage& b,
                             const MetricConfig& cfg) {
  ScssimResult r;
  r.a_vs_b = directional_similarity(a, b, cfg);
  r.b_vs_a = directional_similarity(b, a, cfg);
  r.score = (r.a_vs_b.similarity + r.b_vs_a.similarity) / 2.0;
  return r;
}

double scssim(const PreparedImage& a, const PreparedImage& b, const MetricConfig& cfg) {
  return scssim_detailed(a, b, cfg).score;
}

double scssim(const RgbImage& a, const RgbImage& b, const MetricConfig& cfg) {
  cfg.validate();
  return scssim(PreparedImage(a, cfg.n_cuts), PreparedImage(b, cfg.n_cuts), cfg);
}

}  // namespace scssim
