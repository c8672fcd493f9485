#pragma once

// Disjoint four-plane ground fitting. Each plane hypothesis gets a B x B
// grid of inlier counts over the cloud's bounding square; summed-area
// tables turn every axis-aligned rectangle count into four lookups, which
// makes an exhaustive search over all cross-shaped cuts of the square
// cost O(B^2 M) after O((N + B^2) M) preprocessing.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groundfit/ransac.hpp"
#include "groundfit/scan.hpp"
#include "groundfit/tangent.hpp"
#include "groundfit/types.hpp"

namespace groundfit {

/// Quadrants of a cross partition, in serialization order.
enum Quadrant : std::size_t { kNW = 0, kNE = 1, kSW = 2, kSE = 3 };
inline constexpr std::array<const char*, 4> kQuadrantNames = {"NW", "NE", "SW", "SE"};

/// Column (x) or row (y) bin of a coordinate. Cells are half-open, the
/// last one closed; coordinates outside the square clamp to the edge bins.
inline std::size_t bin_coordinate(double v, double lo, double side, std::size_t bins) {
  const double f = std::floor((v - lo) / side * static_cast<double>(bins));
  if (!(f > 0.0)) return 0;  // also catches NaN
  return std::min(static_cast<std::size_t>(f), bins - 1);
}

struct BinIndex {
  std::size_t c = 0;  // along x
  std::size_t r = 0;  // along y
};

inline BinIndex bin_of(const Point& p, const CloudBounds& bounds, std::size_t bins) {
  return {bin_coordinate(p.x, bounds.min_x(), bounds.side(), bins),
          bin_coordinate(p.y, bounds.min_y(), bounds.side(), bins)};
}

/// Per-bin inlier counts of one hypothesis.
struct BinGrid {
  std::size_t bins = 0;
  CloudBounds bounds;
  std::vector<std::uint32_t> counts;  // counts[r * bins + c]

  std::uint32_t at(std::size_t c, std::size_t r) const { return counts[r * bins + c]; }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto v : counts) s += v;
    return s;
  }
};

/// Inclusive 2D prefix sums of a BinGrid.
struct InlierIntegral {
  std::size_t bins = 0;
  std::vector<std::uint32_t> values;  // values[r * bins + c]

  std::uint32_t at(std::size_t c, std::size_t r) const { return values[r * bins + c]; }
  std::uint32_t total() const { return bins ? values.back() : 0; }
};

inline BinGrid bin_inliers(std::span<const Point> points, const InlierMask& mask,
                           const CloudBounds& bounds, std::size_t bins) {
  if (bins < 2) throw Error("grid needs at least 2 bins per side");
  if (!(bounds.half_extent > 0.0)) throw Error("bounds half extent must be positive");
  if (mask.size() != points.size()) throw Error("mask and point count differ");
  BinGrid grid{bins, bounds, std::vector<std::uint32_t>(bins * bins, 0)};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!mask[i]) continue;
    const auto b = bin_of(points[i], bounds, bins);
    ++grid.counts[b.r * bins + b.c];
  }
  return grid;
}

inline InlierIntegral integral_image(const BinGrid& grid) {
  const std::size_t n = grid.bins;
  InlierIntegral out{n, std::vector<std::uint32_t>(n * n, 0)};
  for (std::size_t r = 0; r < n; ++r) {
    std::uint32_t row = 0;
    for (std::size_t c = 0; c < n; ++c) {
      row += grid.counts[r * n + c];
      out.values[r * n + c] = row + (r ? out.values[(r - 1) * n + c] : 0);
    }
  }
  return out;
}

/// Inclusive bin rectangle (c0, r0)-(c1, r1).
struct BinRect {
  std::size_t c0 = 0, r0 = 0, c1 = 0, r1 = 0;
};

/// Sum of the bins inside an inclusive rectangle. The corner terms use the
/// row/column just outside the rectangle, so nothing is double counted.
inline std::uint32_t rect_sum(const InlierIntegral& integral, const BinRect& rect) {
  if (rect.c0 > rect.c1 || rect.r0 > rect.r1 || rect.c1 >= integral.bins ||
      rect.r1 >= integral.bins) {
    throw Error("invalid bin rectangle");
  }
  const auto at = [&](std::size_t c, std::size_t r) { return integral.at(c, r); };
  std::uint32_t s = at(rect.c1, rect.r1);
  if (rect.c0 > 0) s -= at(rect.c0 - 1, rect.r1);
  if (rect.r0 > 0) s -= at(rect.c1, rect.r0 - 1);
  if (rect.c0 > 0 && rect.r0 > 0) s += at(rect.c0 - 1, rect.r0 - 1);
  return s;
}

/// The four quadrants cut by the cross whose vertical line lies on the
/// left edge of column `c` and horizontal line on the top edge of row `r`.
inline std::array<BinRect, 4> quadrant_rects(std::size_t c, std::size_t r,
                                             std::size_t bins) {
  return {BinRect{0, 0, c - 1, r - 1}, BinRect{c, 0, bins - 1, r - 1},
          BinRect{0, r, c - 1, bins - 1}, BinRect{c, r, bins - 1, bins - 1}};
}

inline Quadrant quadrant_of(const BinIndex& bin, std::size_t c, std::size_t r) {
  return static_cast<Quadrant>((bin.c >= c ? 1 : 0) + (bin.r >= r ? 2 : 0));
}

struct PartitionResult {
  std::size_t center_c = 0;
  std::size_t center_r = 0;
  std::array<std::size_t, 4> plane_index{};
  std::array<std::uint32_t, 4> quadrant_inliers{};
  std::uint64_t best_sum = 0;

  bool operator==(const PartitionResult&) const = default;
};

/// Best cross partition and per-quadrant plane. Centers range over
/// 1 <= c, r <= B-1 so that every quadrant is non-empty; a center is
/// feasible when each quadrant keeps at least `min_inliers`. Ties go to the
/// smallest (r, c), then the smallest plane indices.
inline std::optional<PartitionResult> cross_search(std::span<const InlierIntegral> integrals,
                                                   std::uint32_t min_inliers) {
  if (integrals.empty()) throw Error("cross search needs at least one hypothesis");
  const std::size_t bins = integrals.front().bins;
  for (const auto& I : integrals) {
    if (I.bins != bins || I.values.size() != bins * bins) {
      throw Error("integral images differ in size");
    }
  }
  if (bins < 2) throw Error("grid needs at least 2 bins per side");
  const std::size_t hyps = integrals.size();
  const std::size_t centers = (bins - 1) * (bins - 1);

  // Hypotheses outermost: each one only touches its own integral image and
  // the running per-center maxima, both of which stay cache resident.
  // Visiting m in increasing order with a strict comparison keeps the
  // lowest index on ties.
  std::array<std::vector<std::uint32_t>, 4> top;
  std::array<std::vector<std::uint32_t>, 4> arg;
  for (std::size_t s = 0; s < 4; ++s) {
    top[s].assign(centers, 0);
    arg[s].assign(centers, 0);
  }
  const std::size_t stride = bins + 1;
  std::vector<std::uint32_t> padded(stride * stride, 0);
  for (std::size_t m = 0; m < hyps; ++m) {
    // Exclusive prefix sums with a zero first row and column.
    for (std::size_t r = 0; r < bins; ++r) {
      for (std::size_t c = 0; c < bins; ++c) {
        padded[(r + 1) * stride + (c + 1)] = integrals[m].at(c, r);
      }
    }
    const auto P = [&](std::size_t c, std::size_t r) { return padded[r * stride + c]; };
    const std::uint32_t total = P(bins, bins);
    for (std::size_t r = 1; r < bins; ++r) {
      for (std::size_t c = 1; c < bins; ++c) {
        const std::uint32_t nw = P(c, r);
        const std::uint32_t north = P(bins, r);
        const std::uint32_t west = P(c, bins);
        const std::uint32_t v[4] = {nw, north - nw, west - nw, total - north - west + nw};
        const std::size_t k = (r - 1) * (bins - 1) + (c - 1);
        for (std::size_t s = 0; s < 4; ++s) {
          if (m == 0 || v[s] > top[s][k]) {
            top[s][k] = v[s];
            arg[s][k] = static_cast<std::uint32_t>(m);
          }
        }
      }
    }
  }

  std::optional<PartitionResult> best;
  for (std::size_t r = 1; r < bins; ++r) {
    for (std::size_t c = 1; c < bins; ++c) {
      const std::size_t k = (r - 1) * (bins - 1) + (c - 1);
      PartitionResult cur;
      cur.center_c = c;
      cur.center_r = r;
      bool feasible = true;
      for (std::size_t s = 0; s < 4; ++s) {
        cur.plane_index[s] = arg[s][k];
        cur.quadrant_inliers[s] = top[s][k];
        cur.best_sum += top[s][k];
        feasible = feasible && top[s][k] >= min_inliers;
      }
      if (!feasible) continue;
      if (!best || cur.best_sum > best->best_sum) best = cur;
    }
  }
  return best;
}

/// Ground flags keyed by point_id together with the model that produced them.
struct GroundLabeling {
  std::vector<std::size_t> point_ids;
  std::vector<std::uint8_t> ground;

  std::string method;
  // One plane for single-plane models, four (NW, NE, SW, SE) for a
  // partition, one per non-empty slab for LPR.
  std::vector<PlaneHypothesis> planes;
  std::optional<PartitionResult> partition;
  CloudBounds bounds;
  std::size_t bins = 0;
  bool fallback = false;
  std::size_t fit_points = 0;

  std::size_t ground_count() const {
    std::size_t n = 0;
    for (auto g : ground) n += g;
    return n;
  }
};

/// Tests every point against the plane of its own quadrant only.
inline GroundLabeling label_ground(std::span<const Point> points,
                                   const TangentField& tangents,
                                   std::span<const PlaneHypothesis> hypotheses,
                                   const PartitionResult& result, const CloudBounds& bounds,
                                   std::size_t bins, const VerifyParams& params) {
  const double sin_delta = std::sin(params.delta);
  GroundLabeling out;
  out.method = "proposed";
  out.partition = result;
  out.bounds = bounds;
  out.bins = bins;
  for (std::size_t s = 0; s < 4; ++s) out.planes.push_back(hypotheses[result.plane_index[s]]);
  out.point_ids.reserve(points.size());
  out.ground.reserve(points.size());
  for (const auto& p : points) {
    const auto q = quadrant_of(bin_of(p, bounds, bins), result.center_c, result.center_r);
    const auto& plane = out.planes[q];
    const bool g = is_distance_inlier(plane, p.position(), params.epsilon) &&
                   tangents.has(p.point_id) &&
                   is_tangent_consistent(plane, tangents[p.point_id], sin_delta);
    out.point_ids.push_back(p.point_id);
    out.ground.push_back(g);
  }
  return out;
}

/// Everything the end-to-end detectors need.
struct DetectConfig {
  std::uint32_t beams = kDefaultBeams;
  std::uint32_t azimuth_steps = kDefaultAzimuthSteps;
  TangentParams tangent;
  double crop_radius = 40.0;
  double downsample = 0.1;
  RansacParams ransac;
  std::size_t grid_size = 80;
  std::uint32_t min_quadrant_inliers = 50;

  CloudBounds bounds() const { return CloudBounds{0.0, 0.0, crop_radius}; }
};

namespace detail {

// Fit-set data laid out for the per-hypothesis inner loop.
struct PackedFitSet {
  std::vector<double> x, y, z, tx, ty, tz;
  std::vector<std::uint8_t> has_tangent;
  std::vector<std::uint32_t> bin;  // r * B + c

  PackedFitSet(std::span<const Point> pts, const TangentField& tangents,
               const CloudBounds& bounds, std::size_t bins) {
    const std::size_t n = pts.size();
    x.resize(n), y.resize(n), z.resize(n);
    tx.resize(n), ty.resize(n), tz.resize(n);
    has_tangent.resize(n), bin.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = pts[i];
      x[i] = p.x, y[i] = p.y, z[i] = p.z;
      if (tangents.has(p.point_id)) {
        const auto& t = tangents[p.point_id];
        tx[i] = t.x(), ty[i] = t.y(), tz[i] = t.z();
        has_tangent[i] = 1;
      } else {
        tx[i] = ty[i] = tz[i] = 0.0;
        has_tangent[i] = 0;
      }
      const auto b = bin_of(p, bounds, bins);
      bin[i] = static_cast<std::uint32_t>(b.r * bins + b.c);
    }
  }
};

}  // namespace detail

/// Organize, estimate tangents, crop, downsample, sample hypotheses, build
/// one integral image per hypothesis, search the best cross partition and
/// label the cropped full-resolution cloud. When no partition satisfies the
/// per-quadrant minimum the single best tangent-verified plane is used.
inline GroundLabeling detect_ground(std::span<const Point> points, const DetectConfig& config) {
  config.ransac.verify.validate();
  if (config.grid_size < 2) throw Error("grid size must be at least 2");

  const RangeScan scan = organize(points, config.beams, config.azimuth_steps);
  const TangentField tangents = estimate_tangents(points, scan, config.tangent);
  const auto cropped = crop_radius(points, config.crop_radius);
  const auto fit = grid_downsample(cropped, config.downsample);
  const auto hyps = sample_hypotheses(fit, config.ransac.hypotheses, config.ransac.max_tilt,
                                      config.ransac.seed);

  const CloudBounds bounds = config.bounds();
  const std::size_t bins = config.grid_size;
  const detail::PackedFitSet packed(fit, tangents, bounds, bins);
  const double eps = config.ransac.verify.epsilon;
  const double sin_delta = std::sin(config.ransac.verify.delta);

  std::vector<InlierIntegral> integrals(hyps.size());
  std::vector<std::uint32_t> popcounts(hyps.size(), 0);
  BinGrid grid{bins, bounds, std::vector<std::uint32_t>(bins * bins)};
  for (std::size_t m = 0; m < hyps.size(); ++m) {
    const auto& h = hyps[m];
    const double nx = h.normal.x(), ny = h.normal.y(), nz = h.normal.z(), d = h.offset;
    std::fill(grid.counts.begin(), grid.counts.end(), 0u);
    std::uint32_t pop = 0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
      const bool in = std::abs(nx * packed.x[i] + ny * packed.y[i] + nz * packed.z[i] + d) < eps &&
                      packed.has_tangent[i] &&
                      std::abs(nx * packed.tx[i] + ny * packed.ty[i] + nz * packed.tz[i]) <
                          sin_delta;
      grid.counts[packed.bin[i]] += in;
      pop += in;
    }
    popcounts[m] = pop;
    integrals[m] = integral_image(grid);
  }

  if (const auto result = cross_search(integrals, config.min_quadrant_inliers)) {
    auto out = label_ground(cropped, tangents, hyps, *result, bounds, bins, config.ransac.verify);
    out.fit_points = fit.size();
    return out;
  }

  const auto best = static_cast<std::size_t>(
      std::max_element(popcounts.begin(), popcounts.end()) - popcounts.begin());
  const auto mask = verify_tangent(hyps[best], cropped, tangents, config.ransac.verify);
  GroundLabeling out;
  out.method = "proposed";
  out.fallback = true;
  out.planes = {hyps[best]};
  out.bounds = bounds;
  out.bins = bins;
  out.fit_points = fit.size();
  for (std::size_t i = 0; i < cropped.size(); ++i) {
    out.point_ids.push_back(cropped[i].point_id);
    out.ground.push_back(mask.flags[i]);
  }
  return out;
}

}  // namespace groundfit
