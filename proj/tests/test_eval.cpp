#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace groundfit;

TEST(Metrics, CountsAndRatios) {
  const auto m = metrics_from_counts(6, 2, 3, 9);
  EXPECT_EQ(m.total(), 20u);
  EXPECT_DOUBLE_EQ(*m.precision, 0.75);
  EXPECT_DOUBLE_EQ(*m.recall, 6.0 / 9.0);
  EXPECT_DOUBLE_EQ(*m.f1, 12.0 / 17.0);
}

TEST(Metrics, ZeroDenominatorsAreUndefined) {
  const auto m = metrics_from_counts(0, 0, 0, 5);
  EXPECT_FALSE(m.precision);
  EXPECT_FALSE(m.recall);
  EXPECT_FALSE(m.f1);
  EXPECT_NE(format_metrics(m).find("precision=undefined"), std::string::npos);
}

TEST(Score, PerfectAndErrors) {
  const LabelTable truth{{0, 1, 2, 3}, {1, 0, 1, 0}};
  const auto m = score(truth, truth);
  EXPECT_DOUBLE_EQ(*m.f1, 1.0);
  EXPECT_THROW(score(LabelTable{{9}, {1}}, truth), Error);
  EXPECT_THROW(score(LabelTable{}, truth), Error);
  // Truth points without a prediction are not counted.
  const auto sub = score(LabelTable{{0, 1}, {1, 1}}, truth);
  EXPECT_EQ(sub.total(), 2u);
  EXPECT_EQ(sub.false_positives, 1u);
}

TEST(Score, PermutationInvariant) {
  std::mt19937_64 rng(1);
  LabelTable truth, pred;
  for (std::size_t i = 0; i < 200; ++i) {
    truth.ids.push_back(i);
    truth.values.push_back(rng() % 2);
    pred.ids.push_back(i);
    pred.values.push_back(rng() % 2);
  }
  const auto a = score(pred, truth);
  std::vector<std::size_t> order(200);
  for (std::size_t i = 0; i < 200; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  LabelTable shuffled;
  for (auto i : order) {
    shuffled.ids.push_back(pred.ids[i]);
    shuffled.values.push_back(pred.values[i]);
  }
  const auto b = score(shuffled, truth);
  EXPECT_EQ(a.true_positives, b.true_positives);
  EXPECT_EQ(a.false_positives, b.false_positives);
  EXPECT_EQ(a.false_negatives, b.false_negatives);
  EXPECT_EQ(a.true_negatives, b.true_negatives);
}

TEST(Score, CountsSumToLabeledPredictions) {
  const auto& cloud = testing_support::scene_cloud("crowded");
  const auto labeling = detect_ground(cloud.points, DetectConfig{});
  const auto m = score(labeling, cloud);
  EXPECT_EQ(m.total(), labeling.point_ids.size());
}

TEST(Bench, ReportShape) {
  const auto& cloud = testing_support::scene_cloud("flat");
  RunConfig cfg;
  cfg.method = Method::lpr;
  const auto r = bench(cloud.points, cfg, 3);
  EXPECT_EQ(r.runs, 3u);
  EXPECT_LE(r.mean_ms, r.p95_ms * 3.0);
  EXPECT_GT(r.fit_points, 0u);
  EXPECT_EQ(r.config_hash, hash_text(format_config(cfg)));
  EXPECT_THROW(bench(cloud.points, cfg, 0), Error);
  const auto row = bench_csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
}
