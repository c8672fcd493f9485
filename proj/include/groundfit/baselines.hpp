#pragma once

// Comparison methods: a single distance-verified RANSAC plane, and
// fixed-partition plane fitting seeded by the lowest points of each
// longitudinal slab (LPR).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "groundfit/partition.hpp"
#include "groundfit/ransac.hpp"
#include "groundfit/types.hpp"

namespace groundfit {

struct VanillaResult {
  PlaneHypothesis plane;
  GroundLabeling labeling;
};

/// Single plane, distance-only verification; the labeling is exactly the
/// inlier mask of the returned plane over `points`.
inline VanillaResult vanilla_ransac(std::span<const Point> points, const RansacParams& params) {
  const auto fit = fit_single_plane(points, nullptr, params);
  VanillaResult out;
  out.plane = fit.plane;
  out.labeling.method = "vanilla";
  out.labeling.planes = {fit.plane};
  out.labeling.fit_points = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.labeling.point_ids.push_back(points[i].point_id);
    out.labeling.ground.push_back(fit.mask.flags[i]);
  }
  return out;
}

/// Orthogonal-distance regression plane: through the centroid, normal along
/// the smallest principal direction. Needs at least 3 points.
inline std::optional<PlaneHypothesis> fit_plane_least_squares(std::span<const Vec3> pts) {
  if (pts.size() < 3) return std::nullopt;
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Vec3 q = p - mean;
    cov += q * q.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  if (eig.info() != Eigen::Success) return std::nullopt;
  const Vec3 n = eig.eigenvectors().col(0).normalized();  // ascending eigenvalues
  if (!n.allFinite()) return std::nullopt;
  return PlaneHypothesis{n, -n.dot(mean)}.canonical();
}

struct LprParams {
  std::size_t num_segments = 3;
  std::size_t num_iterations = 3;
  std::size_t num_lpr = 20;
  double seed_height_margin = 0.4;
  double epsilon = 0.2;
  // Longitudinal extent split into equal slabs.
  double x_min = -40.0;
  double x_max = 40.0;

  void validate() const {
    if (num_segments == 0 || num_iterations == 0 || num_lpr == 0) {
      throw Error("LPR counts must be positive");
    }
    if (!(x_max > x_min)) throw Error("LPR extent is empty");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  }
};

inline std::size_t lpr_slab(double x, const LprParams& params) {
  const double f = std::floor((x - params.x_min) / (params.x_max - params.x_min) *
                              static_cast<double>(params.num_segments));
  if (!(f > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(f), params.num_segments - 1);
}

/// Fits one plane per slab. A slab with fewer than 3 seed points gets none.
inline std::vector<std::optional<PlaneHypothesis>> fit_lpr_planes(std::span<const Point> points,
                                                                  const LprParams& params) {
  params.validate();
  std::vector<std::vector<Vec3>> slabs(params.num_segments);
  for (const auto& p : points) slabs[lpr_slab(p.x, params)].push_back(p.position());

  std::vector<std::optional<PlaneHypothesis>> planes(params.num_segments);
  for (std::size_t s = 0; s < params.num_segments; ++s) {
    auto& pts = slabs[s];
    if (pts.size() < 3) continue;

    std::vector<double> heights;
    heights.reserve(pts.size());
    for (const auto& p : pts) heights.push_back(p.z());
    const std::size_t k = std::min(params.num_lpr, heights.size());
    std::partial_sort(heights.begin(), heights.begin() + static_cast<std::ptrdiff_t>(k),
                      heights.end());
    double lpr = 0.0;
    for (std::size_t i = 0; i < k; ++i) lpr += heights[i];
    lpr /= static_cast<double>(k);

    std::vector<Vec3> current;
    for (const auto& p : pts) {
      if (p.z() <= lpr + params.seed_height_margin) current.push_back(p);
    }
    std::optional<PlaneHypothesis> plane;
    for (std::size_t it = 0; it < params.num_iterations; ++it) {
      plane = fit_plane_least_squares(current);
      if (!plane) break;
      current.clear();
      for (const auto& p : pts) {
        if (is_distance_inlier(*plane, p, params.epsilon)) current.push_back(p);
      }
    }
    planes[s] = plane;
  }
  return planes;
}

/// Labels each point with the plane of its slab.
inline GroundLabeling label_lpr(std::span<const Point> points,
                                std::span<const std::optional<PlaneHypothesis>> planes,
                                const LprParams& params) {
  GroundLabeling out;
  out.method = "lpr";
  for (const auto& p : planes) {
    if (p) out.planes.push_back(*p);
  }
  for (const auto& p : points) {
    const auto& plane = planes[lpr_slab(p.x, params)];
    out.point_ids.push_back(p.point_id);
    out.ground.push_back(plane && is_distance_inlier(*plane, p.position(), params.epsilon));
  }
  return out;
}

inline GroundLabeling lpr_fit(std::span<const Point> points, const LprParams& params) {
  const auto planes = fit_lpr_planes(points, params);
  auto out = label_lpr(points, planes, params);
  out.fit_points = points.size();
  return out;
}

}  // namespace groundfit
