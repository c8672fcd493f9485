#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "groundfit/io.hpp"
#include "groundfit/pipeline.hpp"

namespace groundfit {

/// Confusion counts with ground as the positive class. Ratios whose
/// denominator is zero are left empty rather than reported as 0.
struct SegmentationMetrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  std::size_t total() const {
    return true_positives + false_positives + false_negatives + true_negatives;
  }
};

inline SegmentationMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                               std::size_t tn) {
  SegmentationMetrics m{tp, fp, fn, tn, {}, {}, {}};
  const auto ratio = [](std::size_t a, std::size_t b) -> std::optional<double> {
    if (b == 0) return std::nullopt;
    return static_cast<double>(a) / static_cast<double>(b);
  };
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  return m;
}

/// Scores every predicted point against its truth label. Each predicted id
/// must carry a truth label; truth points without a prediction (for
/// example outside the crop) are not counted.
inline SegmentationMetrics score(const LabelTable& predicted, const LabelTable& truth) {
  std::unordered_map<std::size_t, std::uint8_t> lookup;
  lookup.reserve(truth.ids.size());
  for (std::size_t i = 0; i < truth.ids.size(); ++i) lookup[truth.ids[i]] = truth.values[i];

  if (predicted.ids.empty()) throw Error("prediction is empty");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < predicted.ids.size(); ++i) {
    const auto it = lookup.find(predicted.ids[i]);
    if (it == lookup.end()) {
      throw Error("point_id " + std::to_string(predicted.ids[i]) + " has no truth label");
    }
    const bool p = predicted.values[i] != 0;
    const bool t = it->second != 0;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
    tn += !p && !t;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

inline SegmentationMetrics score(const GroundLabeling& predicted, const Cloud& truth) {
  LabelTable t;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth.has_labels() && truth.labels[i] >= 0) {
      t.ids.push_back(truth.points[i].point_id);
      t.values.push_back(static_cast<std::uint8_t>(truth.labels[i]));
    }
  }
  return score(to_label_table(predicted), t);
}

inline std::string format_optional(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

inline std::string format_metrics(const SegmentationMetrics& m) {
  std::string out;
  out += "true_positives=" + std::to_string(m.true_positives) + "\n";
  out += "false_positives=" + std::to_string(m.false_positives) + "\n";
  out += "false_negatives=" + std::to_string(m.false_negatives) + "\n";
  out += "true_negatives=" + std::to_string(m.true_negatives) + "\n";
  out += "precision=" + format_optional(m.precision) + "\n";
  out += "recall=" + format_optional(m.recall) + "\n";
  out += "f1=" + format_optional(m.f1) + "\n";
  return out;
}

inline std::string metrics_csv_header() {
  return "tp,fp,fn,tn,precision,recall,f1\n";
}

inline std::string metrics_csv_row(const SegmentationMetrics& m) {
  return std::to_string(m.true_positives) + "," + std::to_string(m.false_positives) + "," +
         std::to_string(m.false_negatives) + "," + std::to_string(m.true_negatives) + "," +
         format_optional(m.precision) + "," + format_optional(m.recall) + "," +
         format_optional(m.f1) + "\n";
}

struct BenchReport {
  Method method = Method::proposed;
  std::size_t runs = 0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t point_count = 0;
  std::size_t fit_points = 0;
  std::uint64_t config_hash = 0;
};

// FNV-1a, 64 bit.
inline std::uint64_t hash_text(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Times `runs` detection calls (no I/O). Run k uses seed base_seed + k.
inline BenchReport bench(std::span<const Point> points, RunConfig cfg, std::size_t runs) {
  if (runs == 0) throw Error("bench needs at least one run");
  const std::uint64_t base_seed = cfg.detect.ransac.seed;
  BenchReport report;
  report.method = cfg.method;
  report.runs = runs;
  report.point_count = points.size();
  report.config_hash = hash_text(format_config(cfg));

  run_method(points, cfg);  // warm-up, untimed

  std::vector<double> ms;
  ms.reserve(runs);
  for (std::size_t k = 0; k < runs; ++k) {
    cfg.detect.ransac.seed = base_seed + k;
    const auto t0 = std::chrono::steady_clock::now();
    const auto labeling = run_method(points, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    report.fit_points = labeling.fit_points;
  }
  double sum = 0.0;
  for (double v : ms) sum += v;
  report.mean_ms = sum / static_cast<double>(runs);
  std::sort(ms.begin(), ms.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(runs)));
  report.p95_ms = ms[std::max<std::size_t>(rank, 1) - 1];
  return report;
}

inline std::string bench_csv_header() {
  return "method,runs,mean_ms,p95_ms,points,fit_points,config_hash\n";
}

inline std::string bench_csv_row(const BenchReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%zu,%.3f,%.3f,%zu,%zu,%016llx\n", to_string(r.method), r.runs,
                r.mean_ms, r.p95_ms, r.point_count, r.fit_points,
                static_cast<unsigned long long>(r.config_hash));
  return buf;
}

}  // namespace groundfit
