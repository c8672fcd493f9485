#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace groundfit;

TEST(Config, DefaultsEcho) {
  const auto text = format_config(RunConfig{});
  EXPECT_NE(text.find("epsilon=0.2\n"), std::string::npos);
  EXPECT_NE(text.find("hypotheses=200\n"), std::string::npos);
  EXPECT_NE(text.find("grid-size=80\n"), std::string::npos);
  EXPECT_NE(text.find("delta-deg=10\n"), std::string::npos);
  EXPECT_NE(text.find("min-quadrant-inliers=50\n"), std::string::npos);
  EXPECT_NE(text.find("crop-radius=40\n"), std::string::npos);
  EXPECT_NE(text.find("downsample=0.1\n"), std::string::npos);
}

TEST(Config, KeyValuesApplyAndRoundTrip) {
  std::istringstream in("method = vanilla\nepsilon=0.35\nhypotheses=64\ndelta-deg=7.5\n");
  RunConfig cfg;
  apply_key_values(cfg, parse_key_values(in));
  EXPECT_EQ(cfg.method, Method::vanilla);
  EXPECT_DOUBLE_EQ(cfg.detect.ransac.verify.epsilon, 0.35);
  EXPECT_EQ(cfg.detect.ransac.hypotheses, 64u);
  EXPECT_NEAR(rad_to_deg(cfg.detect.ransac.verify.delta), 7.5, 1e-12);

  std::istringstream again(format_config(cfg));
  RunConfig back;
  apply_key_values(back, parse_key_values(again));
  EXPECT_EQ(format_config(back), format_config(cfg));
}

TEST(Config, BadValuesThrow) {
  RunConfig cfg;
  EXPECT_THROW(apply_key_values(cfg, {{"colour", "red"}}), Error);
  EXPECT_THROW(apply_key_values(cfg, {{"epsilon", "wide"}}), Error);
  EXPECT_THROW(apply_key_values(cfg, {{"hypotheses", "-3"}}), Error);
  EXPECT_THROW(apply_key_values(cfg, {{"method", "magic"}}), Error);
}

TEST(Pipeline, FlatSceneScoresWell) {
  const auto& cloud = testing_support::scene_cloud("flat");
  for (Method m : {Method::proposed, Method::vanilla, Method::lpr}) {
    RunConfig cfg;
    cfg.method = m;
    const auto f1 = score(run_method(cloud.points, cfg), cloud).f1;
    ASSERT_TRUE(f1);
    EXPECT_GE(*f1, 0.98) << to_string(m);
  }
}

TEST(Pipeline, SidecarDescribesPartition) {
  const auto& cloud = testing_support::scene_cloud("sloped_lane");
  RunConfig cfg;
  const auto labeling = run_method(cloud.points, cfg);
  const auto text = format_sidecar(labeling, cfg);
  for (const char* key : {"cross_center_x=", "plane_NW=", "plane_SE=", "inliers_NE=",
                          "best_sum=", "# effective configuration", "epsilon=0.2"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(text, format_sidecar(run_method(cloud.points, cfg), cfg));
}

TEST(Pipeline, LabelTableMatchesLabeling) {
  const auto& cloud = testing_support::scene_cloud("crowded");
  RunConfig cfg;
  cfg.method = Method::lpr;
  const auto labeling = run_method(cloud.points, cfg);
  const auto table = to_label_table(labeling);
  EXPECT_EQ(table.ids, labeling.point_ids);
  EXPECT_EQ(table.values, labeling.ground);
}
