#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "groundfit/tangent.hpp"
#include "groundfit/types.hpp"

namespace groundfit {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Inlier thresholds: point-plane distance `epsilon` (meters) and the
/// allowed deviation `delta` (radians) of a tangent from the plane.
struct VerifyParams {
  double epsilon = 0.2;
  double delta = deg_to_rad(10.0);

  void validate() const {
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (!(delta > 0.0 && delta < std::numbers::pi / 2)) {
      throw Error("delta must lie in (0, pi/2)");
    }
  }
};

/// Per-point inlier flags, indexed by position in the verified span.
struct InlierMask {
  std::vector<std::uint8_t> flags;
  std::size_t popcount = 0;

  std::size_t size() const { return flags.size(); }
  bool operator[](std::size_t i) const { return flags[i] != 0; }
  bool operator==(const InlierMask&) const = default;
};

/// Distance-only test: |n . x + d| < epsilon.
inline bool is_distance_inlier(const PlaneHypothesis& plane, const Vec3& x,
                               double epsilon) {
  return std::abs(plane.signed_distance(x)) < epsilon;
}

/// Tangent test: the angle between tangent and plane, |pi/2 - acos(n . t)|,
/// is below delta. Equivalent to |n . t| < sin(delta) for delta < pi/2.
inline bool is_tangent_consistent(const PlaneHypothesis& plane, const Vec3& t,
                                  double sin_delta) {
  return std::abs(plane.normal.dot(t)) < sin_delta;
}

inline InlierMask verify_distance(const PlaneHypothesis& plane,
                                  std::span<const Point> points, double epsilon) {
  InlierMask mask;
  mask.flags.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool in = is_distance_inlier(plane, points[i].position(), epsilon);
    mask.flags[i] = in;
    mask.popcount += in;
  }
  return mask;
}

/// Distance test plus tangent perpendicularity. Points without a tangent
/// never pass.
inline InlierMask verify_tangent(const PlaneHypothesis& plane,
                                 std::span<const Point> points,
                                 const TangentField& tangents,
                                 const VerifyParams& params) {
  const double sin_delta = std::sin(params.delta);
  InlierMask mask;
  mask.flags.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const bool in = is_distance_inlier(plane, p.position(), params.epsilon) &&
                    tangents.has(p.point_id) &&
                    is_tangent_consistent(plane, tangents[p.point_id], sin_delta);
    mask.flags[i] = in;
    mask.popcount += in;
  }
  return mask;
}

/// Plane through three points, or nothing when they are collinear within
/// 1e-6 (relative to the edge lengths).
inline std::optional<PlaneHypothesis> plane_from_points(const Vec3& a, const Vec3& b,
                                                        const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 n = e1.cross(e2);
  const double scale = e1.norm() * e2.norm();
  if (scale == 0.0 || n.norm() <= 1e-6 * scale) return std::nullopt;
  const Vec3 u = n.normalized();
  return PlaneHypothesis{u, -u.dot(a)}.canonical();
}

/// Draws `count` planes from uniformly sampled triples of distinct points.
/// Degenerate triples and planes tilted more than `max_tilt` radians from
/// horizontal are redrawn; at most 100 * count draws are made in total.
inline std::vector<PlaneHypothesis> sample_hypotheses(std::span<const Point> points,
                                                      std::size_t count,
                                                      double max_tilt,
                                                      std::uint64_t seed) {
  if (count == 0) throw Error("hypothesis count must be at least 1");
  if (points.size() < 3) throw Error("need at least 3 points to sample planes");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  const double min_cos_tilt = std::cos(std::min(max_tilt, std::numbers::pi / 2));

  std::vector<PlaneHypothesis> out;
  out.reserve(count);
  const std::size_t budget = 100 * count;
  for (std::size_t attempt = 0; attempt < budget && out.size() < count; ++attempt) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;
    const auto plane =
        plane_from_points(points[i].position(), points[j].position(), points[k].position());
    if (!plane) continue;
    if (plane->normal.z() < min_cos_tilt) continue;
    out.push_back(*plane);
  }
  if (out.size() < count) {
    throw Error("could only sample " + std::to_string(out.size()) + " of " +
                std::to_string(count) + " plane hypotheses");
  }
  return out;
}

struct SinglePlaneFit {
  PlaneHypothesis plane;
  std::size_t hypothesis_index = 0;
  InlierMask mask;
};

/// Settings shared by the RANSAC-based fitters.
struct RansacParams {
  VerifyParams verify;
  std::size_t hypotheses = 200;
  double max_tilt = deg_to_rad(45.0);
  std::uint64_t seed = 0;
};

/// Evaluates every hypothesis and keeps the one with most inliers (lowest
/// index on ties). Uses the tangent test when `tangents` is given, the
/// distance test otherwise.
inline SinglePlaneFit fit_single_plane(std::span<const Point> points,
                                       const TangentField* tangents,
                                       const RansacParams& params) {
  params.verify.validate();
  const auto hyps =
      sample_hypotheses(points, params.hypotheses, params.max_tilt, params.seed);

  const double eps = params.verify.epsilon;
  const double sin_delta = std::sin(params.verify.delta);
  std::vector<Vec3> tan;
  std::vector<std::uint8_t> has_tan;
  if (tangents) {
    tan.resize(points.size(), Vec3::Zero());
    has_tan.resize(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (tangents->has(points[i].point_id)) {
        tan[i] = (*tangents)[points[i].point_id];
        has_tan[i] = 1;
      }
    }
  }

  std::size_t best = 0;
  std::size_t best_count = 0;
  for (std::size_t m = 0; m < hyps.size(); ++m) {
    const auto& h = hyps[m];
    std::size_t n = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (!is_distance_inlier(h, p.position(), eps)) continue;
      if (tangents && !(has_tan[i] && is_tangent_consistent(h, tan[i], sin_delta))) continue;
      ++n;
    }
    if (m == 0 || n > best_count) {
      best = m;
      best_count = n;
    }
  }

  SinglePlaneFit fit;
  fit.plane = hyps[best];
  fit.hypothesis_index = best;
  fit.mask = tangents ? verify_tangent(fit.plane, points, *tangents, params.verify)
                      : verify_distance(fit.plane, points, eps);
  return fit;
}

}  // namespace groundfit
