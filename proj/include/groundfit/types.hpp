#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace groundfit {

using Vec3 = Eigen::Vector3d;

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::uint32_t kDefaultBeams = 16;
inline constexpr std::uint32_t kDefaultAzimuthSteps = 1800;  // 0.2 deg

/// One lidar return in the vehicle frame (x forward, z up).
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::uint32_t beam = 0;          // scan row
  std::uint32_t azimuth_step = 0;  // scan column
  std::size_t point_id = 0;        // index into the original cloud

  Vec3 position() const { return {x, y, z}; }
  double horizontal_range() const;
  double range() const;
};

/// Points plus an optional per-point ground-truth label.
///
/// `labels` is either empty or has one entry per point: 1 ground, 0 not
/// ground, -1 unlabeled.
struct Cloud {
  std::vector<Point> points;
  std::vector<std::int8_t> labels;

  bool has_labels() const { return !labels.empty(); }
  std::size_t size() const { return points.size(); }
};

/// Horizontal square [cx - h, cx + h] x [cy - h, cy + h].
struct CloudBounds {
  double center_x = 0.0;
  double center_y = 0.0;
  double half_extent = 40.0;

  double min_x() const { return center_x - half_extent; }
  double min_y() const { return center_y - half_extent; }
  double side() const { return 2.0 * half_extent; }
};

/// Plane n . x + d = 0 with unit n and n.z >= 0.
struct PlaneHypothesis {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) + offset; }

  // Flips orientation so that normal.z >= 0 (ties broken on y, then x).
  PlaneHypothesis canonical() const;
};

// ---------------------------------------------------------------------------

inline double Point::horizontal_range() const { return std::hypot(x, y); }

inline double Point::range() const { return std::sqrt(x * x + y * y + z * z); }

inline PlaneHypothesis PlaneHypothesis::canonical() const {
  bool flip = false;
  if (normal.z() != 0.0) {
    flip = normal.z() < 0.0;
  } else if (normal.y() != 0.0) {
    flip = normal.y() < 0.0;
  } else {
    flip = normal.x() < 0.0;
  }
  if (!flip) return *this;
  return PlaneHypothesis{-normal, -offset};
}

}  // namespace groundfit
