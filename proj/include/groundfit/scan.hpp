#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "groundfit/types.hpp"

namespace groundfit {

/// Beams x azimuth-steps grid of optional point references.
///
/// Cells hold indices into the point span the scan was organized from, so
/// the scan stays valid only as long as that span does.
class RangeScan {
 public:
  static constexpr std::size_t kEmpty = std::numeric_limits<std::size_t>::max();

  RangeScan() = default;
  RangeScan(std::uint32_t rows, std::uint32_t cols)
      : rows_(rows), cols_(cols), cells_(std::size_t{rows} * cols, kEmpty) {}

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }

  // Index of the point stored in (row, col), or kEmpty.
  std::size_t at(std::uint32_t row, std::uint32_t col) const {
    return cells_[std::size_t{row} * cols_ + col];
  }
  std::size_t& at(std::uint32_t row, std::uint32_t col) {
    return cells_[std::size_t{row} * cols_ + col];
  }

  std::size_t filled() const {
    std::size_t n = 0;
    for (auto c : cells_) n += (c != kEmpty);
    return n;
  }

  // Number of points dropped because their cell was already taken by a
  // nearer return.
  std::size_t collisions() const { return collisions_; }

 private:
  friend RangeScan organize(std::span<const Point>, std::uint32_t,
                            std::uint32_t);

  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<std::size_t> cells_;
  std::size_t collisions_ = 0;
};

/// Keeps points with horizontal range <= radius (boundary inclusive).
inline std::vector<Point> crop_radius(std::span<const Point> points,
                                      double radius) {
  if (!(radius > 0.0)) throw Error("crop radius must be positive");
  const double r2 = radius * radius;
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (p.x * p.x + p.y * p.y <= r2) out.push_back(p);
  }
  return out;
}

/// Keeps the first point encountered in each horizontal grid cell.
inline std::vector<Point> grid_downsample(std::span<const Point> points,
                                          double cell) {
  if (!(cell > 0.0)) throw Error("downsample cell must be positive");

  struct KeyHash {
    std::size_t operator()(std::uint64_t k) const noexcept {
      k ^= k >> 33;
      k *= 0xff51afd7ed558ccdULL;
      k ^= k >> 33;
      return static_cast<std::size_t>(k);
    }
  };
  std::unordered_set<std::uint64_t, KeyHash> seen;
  seen.reserve(points.size() * 2);

  std::vector<Point> out;
  out.reserve(points.size() / 2);
  for (const auto& p : points) {
    const auto cx = static_cast<std::int64_t>(std::floor(p.x / cell));
    const auto cy = static_cast<std::int64_t>(std::floor(p.y / cell));
    const std::uint64_t key = (static_cast<std::uint64_t>(cx) << 32) ^
                              (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
    if (seen.insert(key).second) out.push_back(p);
  }
  return out;
}

/// Places every point into its (beam, azimuth_step) cell. When two points
/// share a cell the one with the smaller range wins; ties keep the earlier.
inline RangeScan organize(std::span<const Point> points, std::uint32_t rows,
                          std::uint32_t cols) {
  RangeScan scan(rows, cols);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.beam >= rows || p.azimuth_step >= cols) {
      throw Error("point " + std::to_string(p.point_id) +
                  " lies outside the range scan");
    }
    auto& cell = scan.at(p.beam, p.azimuth_step);
    if (cell == RangeScan::kEmpty) {
      cell = i;
      continue;
    }
    ++scan.collisions_;
    if (p.range() < points[cell].range()) cell = i;
  }
  return scan;
}

}  // namespace groundfit
