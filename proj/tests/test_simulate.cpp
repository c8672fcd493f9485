#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace groundfit;

TEST(Raycast, FlatGroundOnlyDownwardBeams) {
  Scene s;
  s.elements.push_back(SceneElement::ground(-1e4, 1e4, -1e4, 1e4));
  LidarConfig lidar;
  const auto cloud = raycast(s, lidar, 3);
  ASSERT_FALSE(cloud.points.empty());
  ASSERT_TRUE(cloud.has_labels());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    EXPECT_LT(lidar.beam_elevations_deg[p.beam], 0.0);
    EXPECT_LE(std::abs(p.z), 3 * lidar.noise_sigma + 1e-12);
    EXPECT_EQ(cloud.labels[i], 1);
  }
}

TEST(Raycast, FlatSceneRowCount) {
  // Beams at -15..-3 deg reach the ground inside 100 m; -1 deg lands at 103 m.
  const auto& cloud = testing_support::scene_cloud("flat");
  EXPECT_EQ(cloud.size(), 7u * 1800u);
}

TEST(Raycast, DeterministicInSeed) {
  const auto scene = canonical_scenes().at("crowded");
  const auto a = raycast(scene, LidarConfig{}, 9);
  const auto b = raycast(scene, LidarConfig{}, 9);
  const auto c = raycast(scene, LidarConfig{}, 10);
  EXPECT_EQ(format_cloud(a), format_cloud(b));
  EXPECT_NE(format_cloud(a), format_cloud(c));
}

TEST(Raycast, LabelsFollowHitElement) {
  const auto scene = canonical_scenes().at("two_slope_wall");
  std::vector<std::uint32_t> hit;
  const auto cloud = raycast(scene, LidarConfig{}, 1, &hit);
  ASSERT_EQ(hit.size(), cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(cloud.labels[i], scene.elements[hit[i]].is_ground ? 1 : 0);
  }
}

TEST(Raycast, NoiselessPointsLieOnTheirSurface) {
  const auto scene = canonical_scenes().at("sloped_lane");
  LidarConfig lidar;
  lidar.noise_sigma = 0.0;
  std::vector<std::uint32_t> hit;
  const auto cloud = raycast(scene, lidar, 1, &hit);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& e = scene.elements[hit[i]];
    if (e.kind == ElementKind::ground_plane || e.kind == ElementKind::ramp) {
      EXPECT_NEAR(e.plane.signed_distance(cloud.points[i].position()), 0.0, 1e-9);
    }
  }
}

TEST(Scene, GroundSteeperThan30DegreesRejected) {
  Scene s;
  s.elements.push_back(SceneElement::ramp(0, 10, 0, 10, Vec3::Zero(), 0, 31));
  EXPECT_THROW(s.validate(), Error);
  s.elements[0] = SceneElement::ramp(0, 10, 0, 10, Vec3::Zero(), 0, 30);
  EXPECT_NO_THROW(s.validate());
}

TEST(Scene, CanonicalScenesValidate) {
  const auto scenes = canonical_scenes();
  EXPECT_EQ(scenes.size(), 7u);
  for (const auto& [name, scene] : scenes) EXPECT_NO_THROW(scene.validate()) << name;
}

TEST(SceneFile, ParsesEveryKind) {
  std::istringstream in(R"(# test scene
[element]
kind = ground_plane
normal = 0 0 2
offset = 0
x_range = -50 50
y_range = -50 50

[element]
kind = ramp
origin = 10 0 0
heading_deg = 0
grade_deg = 5
x_range = 10 30
y_range = -5 5

[element]
kind = box
center = 5 5
size = 4 2
z_range = 0 1.5
yaw_deg = 30

[element]
kind = wall
start = -10 -10
end = -10 10
z_range = 0 3
)");
  const auto scene = parse_scene(in);
  ASSERT_EQ(scene.elements.size(), 4u);
  EXPECT_EQ(scene.elements[0].kind, ElementKind::ground_plane);
  EXPECT_NEAR(scene.elements[0].plane.normal.z(), 1.0, 1e-12);
  EXPECT_NEAR(scene.elements[1].slope_deg(), 5.0, 1e-9);
  EXPECT_FALSE(scene.elements[2].is_ground);
  EXPECT_FALSE(scene.elements[3].is_ground);
}

TEST(SceneFile, Errors) {
  const auto fails = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(parse_scene(in), ParseError) << text;
  };
  fails("kind = box\n");
  fails("[element]\nkind = tree\n");
  fails("[element]\nkind = box\ncenter = 1\nsize = 1 1\nz_range = 0 1\n");
  fails("[element]\nkind = wall\nstart = 0 0\nend = 1 0\nz_range = 0 1\nground = 1\n");
  fails("[element]\nkind = ramp\norigin = 0 0 0\nheading_deg = 0\ngrade_deg = 40\n"
        "x_range = 0 1\ny_range = 0 1\n");
}
