#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "groundfit/scan.hpp"
#include "groundfit/types.hpp"

namespace groundfit {

/// Stencil controls for differentiating along a scan row.
///
/// Each side of the stencil walks outward from the point, taking successive
/// returns of the same beam until one lies at least `min_baseline` away
/// (or `max_stencil` columns have been inspected). Consecutive samples more
/// than `max_gap` columns or `max_chord` meters apart end the walk, so the
/// stencil never bridges a depth discontinuity.
struct TangentParams {
  std::uint32_t max_gap = 5;
  double max_chord = 1.0;
  double min_baseline = 0.3;
  std::uint32_t max_stencil = 64;
};

/// Unit tangent per point_id; absent where no usable row neighbor exists.
class TangentField {
 public:
  TangentField() = default;
  explicit TangentField(std::size_t ids) : dirs_(ids, Vec3::Zero()), valid_(ids, 0) {}

  std::size_t id_capacity() const { return dirs_.size(); }

  bool has(std::size_t id) const { return id < valid_.size() && valid_[id]; }

  std::optional<Vec3> get(std::size_t id) const {
    if (!has(id)) return std::nullopt;
    return dirs_[id];
  }

  // Caller guarantees has(id).
  const Vec3& operator[](std::size_t id) const { return dirs_[id]; }

  void set(std::size_t id, const Vec3& t) {
    if (id >= dirs_.size()) {
      dirs_.resize(id + 1, Vec3::Zero());
      valid_.resize(id + 1, 0);
    }
    dirs_[id] = t.normalized();
    valid_[id] = 1;
  }

  void clear(std::size_t id) {
    if (id < valid_.size()) valid_[id] = 0;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
  }

  TangentField negated() const {
    TangentField out = *this;
    for (auto& d : out.dirs_) d = -d;
    return out;
  }

 private:
  std::vector<Vec3> dirs_;
  std::vector<std::uint8_t> valid_;
};

namespace detail {

// Walks one side of the row; returns the index of the farthest accepted
// sample or RangeScan::kEmpty.
inline std::size_t walk_row(std::span<const Point> points, const RangeScan& scan,
                            std::uint32_t row, std::uint32_t col, int dir,
                            const TangentParams& params) {
  const std::uint32_t cols = scan.cols();
  const Vec3 center = points[scan.at(row, col)].position();
  Vec3 prev = center;
  std::size_t chosen = RangeScan::kEmpty;
  std::uint32_t since_last = 0;
  const std::uint32_t limit = std::min<std::uint32_t>(params.max_stencil, cols - 1);
  for (std::uint32_t k = 1; k <= limit; ++k) {
    ++since_last;
    if (since_last > params.max_gap) break;
    const auto c = static_cast<std::uint32_t>(
        (static_cast<std::int64_t>(col) + dir * static_cast<std::int64_t>(k) + cols) % cols);
    const auto idx = scan.at(row, c);
    if (idx == RangeScan::kEmpty) continue;
    const Vec3 q = points[idx].position();
    if ((q - prev).norm() > params.max_chord) break;
    chosen = idx;
    prev = q;
    since_last = 0;
    if ((q - center).norm() >= params.min_baseline) break;
  }
  return chosen;
}

}  // namespace detail

/// Differentiates each organized point along its beam: central difference
/// between the two stencil ends, one-sided when only one side exists.
/// `scan` must have been organized from `points`.
inline TangentField estimate_tangents(std::span<const Point> points,
                                      const RangeScan& scan,
                                      const TangentParams& params = {}) {
  std::size_t max_id = 0;
  for (const auto& p : points) max_id = std::max(max_id, p.point_id + 1);
  TangentField field(max_id);

  for (std::uint32_t r = 0; r < scan.rows(); ++r) {
    for (std::uint32_t c = 0; c < scan.cols(); ++c) {
      const auto idx = scan.at(r, c);
      if (idx == RangeScan::kEmpty) continue;
      const auto left = detail::walk_row(points, scan, r, c, -1, params);
      const auto right = detail::walk_row(points, scan, r, c, +1, params);
      Vec3 diff;
      if (left != RangeScan::kEmpty && right != RangeScan::kEmpty) {
        diff = points[right].position() - points[left].position();
      } else if (right != RangeScan::kEmpty) {
        diff = points[right].position() - points[idx].position();
      } else if (left != RangeScan::kEmpty) {
        diff = points[idx].position() - points[left].position();
      } else {
        continue;
      }
      if (diff.norm() > 0.0) field.set(points[idx].point_id, diff);
    }
  }
  return field;
}

}  // namespace groundfit
