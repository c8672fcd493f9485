#include <gtest/gtest.h>

#include "support.hpp"

using namespace groundfit;
using testing_support::make_point;

TEST(Crop, KeepsBoundaryPoints) {
  std::vector<Point> pts{make_point(3, 4, 0), make_point(3.0001, 4, 0), make_point(0, 0, 9)};
  const auto out = crop_radius(pts, 5.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].x, 3.0);
  EXPECT_DOUBLE_EQ(out[1].z, 9.0);
}

TEST(Crop, RejectsNonPositiveRadius) {
  std::vector<Point> pts{make_point(0, 0, 0)};
  EXPECT_THROW(crop_radius(pts, 0.0), Error);
}

TEST(Downsample, FirstPointPerCellWins) {
  std::vector<Point> pts{make_point(0.01, 0.01, 1, 0, 0, 0), make_point(0.09, 0.02, 2, 0, 1, 1),
                         make_point(0.11, 0.01, 3, 0, 2, 2), make_point(-0.01, 0.05, 4, 0, 3, 3)};
  const auto out = grid_downsample(pts, 0.1);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].point_id, 0u);
  EXPECT_EQ(out[1].point_id, 2u);
  EXPECT_EQ(out[2].point_id, 3u);
}

TEST(Downsample, OutputIsSubsetInInputOrder) {
  const auto& cloud = testing_support::scene_cloud("crowded");
  const auto out = grid_downsample(cloud.points, 0.1);
  ASSERT_LE(out.size(), cloud.size());
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LT(out[i - 1].point_id, out[i].point_id);
}

TEST(Organize, NearerPointWinsCollision) {
  std::vector<Point> pts{make_point(10, 0, 0, 1, 5, 0), make_point(5, 0, 0, 1, 5, 1),
                         make_point(7, 0, 0, 1, 5, 2)};
  const auto scan = organize(pts, 2, 10);
  EXPECT_EQ(scan.at(1, 5), 1u);
  EXPECT_EQ(scan.collisions(), 2u);
  EXPECT_EQ(scan.filled(), 1u);
  EXPECT_EQ(scan.at(0, 0), RangeScan::kEmpty);
}

TEST(Organize, OutOfRangeIndexThrows) {
  std::vector<Point> pts{make_point(1, 0, 0, 16, 0)};
  EXPECT_THROW(organize(pts, 16, 1800), Error);
  std::vector<Point> pts2{make_point(1, 0, 0, 0, 1800)};
  EXPECT_THROW(organize(pts2, 16, 1800), Error);
}

TEST(Organize, SimulatedScanHasNoCollisions) {
  const auto& cloud = testing_support::scene_cloud("two_slope_wall");
  const auto scan = organize(cloud.points, 16, 1800);
  EXPECT_EQ(scan.filled(), cloud.size());
  EXPECT_EQ(scan.collisions(), 0u);
}
