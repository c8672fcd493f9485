#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace groundfit;

namespace {

struct Scan {
  Cloud cloud;
  TangentField tangents;
};

const Scan& scan(const std::string& name) {
  static std::map<std::string, Scan> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    Scan s;
    s.cloud = testing_support::scene_cloud(name);
    s.tangents = estimate_tangents(s.cloud.points, organize(s.cloud.points, 16, 1800));
    it = cache.emplace(name, std::move(s)).first;
  }
  return it->second;
}

}  // namespace

TEST(PlaneFromPoints, ThroughThreePoints) {
  const auto p = plane_from_points(Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(0, 1, 1));
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->normal.z(), 1.0, 1e-12);
  EXPECT_NEAR(p->offset, -1.0, 1e-12);
}

TEST(PlaneFromPoints, CollinearRejected) {
  EXPECT_FALSE(plane_from_points(Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(2, 2, 2)));
  EXPECT_FALSE(plane_from_points(Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(2, 2, 2)));
}

TEST(PlaneFromPoints, CanonicalNormalPointsUp) {
  const auto p = plane_from_points(Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0.2));
  ASSERT_TRUE(p);
  EXPECT_GT(p->normal.z(), 0.0);
}

TEST(Sampling, DeterministicAndTiltLimited) {
  const auto& pts = scan("two_slope_wall").cloud.points;
  const auto a = sample_hypotheses(pts, 50, deg_to_rad(20), 7);
  const auto b = sample_hypotheses(pts, 50, deg_to_rad(20), 7);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].normal, b[i].normal);
    EXPECT_EQ(a[i].offset, b[i].offset);
    EXPECT_GE(a[i].normal.z(), std::cos(deg_to_rad(20)) - 1e-12);
  }
}

TEST(Sampling, Errors) {
  std::vector<Point> two(2);
  EXPECT_THROW(sample_hypotheses(two, 5, 1.0, 0), Error);
  // All points on one vertical wall: no plane passes a 10 degree tilt gate.
  std::vector<Point> wall;
  for (int i = 0; i < 30; ++i) {
    wall.push_back(testing_support::make_point(5, i * 0.1, (i % 7) * 0.3));
  }
  EXPECT_THROW(sample_hypotheses(wall, 5, deg_to_rad(10), 0), Error);
}

TEST(Verify, TangentMaskWithinDistanceMask) {
  const auto& s = scan("crowded");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int k = 0; k < 10; ++k) {
    PlaneHypothesis pl{Vec3(u(rng), u(rng), 1).normalized(), 2.0 * u(rng)};
    const VerifyParams vp{0.05 + std::abs(u(rng)), deg_to_rad(10)};
    const auto d = verify_distance(pl, s.cloud.points, vp.epsilon);
    const auto t = verify_tangent(pl, s.cloud.points, s.tangents, vp);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (t[i]) {
        EXPECT_TRUE(d[i]);
      }
    }
    EXPECT_LE(t.popcount, d.popcount);
  }
}

TEST(Verify, EpsilonMonotone) {
  const auto& s = scan("two_slope_wall");
  const PlaneHypothesis pl{Vec3(0, 0, 1), 0.0};
  std::size_t prev_d = 0, prev_t = 0;
  for (double eps : {0.05, 0.1, 0.2, 0.4}) {
    const auto d = verify_distance(pl, s.cloud.points, eps).popcount;
    const auto t = verify_tangent(pl, s.cloud.points, s.tangents, {eps, deg_to_rad(10)}).popcount;
    EXPECT_GE(d, prev_d);
    EXPECT_GE(t, prev_t);
    prev_d = d;
    prev_t = t;
  }
}

TEST(Verify, TangentSignIrrelevant) {
  const auto& s = scan("sloped_lane");
  const auto neg = s.tangents.negated();
  for (const auto& pl : sample_hypotheses(s.cloud.points, 20, deg_to_rad(45), 2)) {
    EXPECT_EQ(verify_tangent(pl, s.cloud.points, s.tangents, {}),
              verify_tangent(pl, s.cloud.points, neg, {}));
  }
}

TEST(Verify, StrictDistanceThreshold) {
  const PlaneHypothesis pl{Vec3(0, 0, 1), 0.0};
  EXPECT_FALSE(is_distance_inlier(pl, Vec3(0, 0, 0.25), 0.25));
  EXPECT_TRUE(is_distance_inlier(pl, Vec3(0, 0, 0.2499), 0.25));
}

TEST(Verify, RejectsBadParams) {
  EXPECT_THROW((VerifyParams{0.0, 0.1}.validate()), Error);
  EXPECT_THROW((VerifyParams{0.2, 2.0}.validate()), Error);
}

TEST(SinglePlane, FindsFlatGround) {
  const auto& s = scan("flat");
  RansacParams params;
  const auto fit = fit_single_plane(s.cloud.points, &s.tangents, params);
  EXPECT_GT(fit.plane.normal.z(), 0.999);
  EXPECT_NEAR(fit.plane.offset, 0.0, 0.05);
  EXPECT_EQ(fit.mask, verify_tangent(fit.plane, s.cloud.points, s.tangents, params.verify));
}
