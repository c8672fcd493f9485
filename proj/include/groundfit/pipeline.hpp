#pragma once

// Method dispatch, run configuration and labeling serialization shared by
// the command-line tool, the benchmark and the tests.

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groundfit/baselines.hpp"
#include "groundfit/io.hpp"
#include "groundfit/partition.hpp"
#include "groundfit/scan.hpp"

namespace groundfit {

enum class Method { proposed, vanilla, lpr };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::vanilla: return "vanilla";
    case Method::lpr: return "lpr";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "proposed") return Method::proposed;
  if (s == "vanilla") return Method::vanilla;
  if (s == "lpr") return Method::lpr;
  throw Error("unknown method '" + std::string(s) + "' (expected proposed, vanilla or lpr)");
}

struct RunConfig {
  Method method = Method::proposed;
  DetectConfig detect;
  LprParams lpr;

  // LPR slabs span the crop square.
  LprParams lpr_params() const {
    LprParams p = lpr;
    p.epsilon = detect.ransac.verify.epsilon;
    p.x_min = -detect.crop_radius;
    p.x_max = detect.crop_radius;
    return p;
  }
};

/// Overrides fields from flat key=value pairs; keys mirror the CLI flags.
inline void apply_key_values(RunConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    const auto num = [&]() {
      const auto v = detail::parse_number<double>(value);
      if (!v || !std::isfinite(*v)) throw Error("config key '" + key + "' expects a number");
      return *v;
    };
    const auto count = [&]() {
      const auto v = detail::parse_number<std::uint64_t>(value);
      if (!v) throw Error("config key '" + key + "' expects a non-negative integer");
      return *v;
    };
    auto& d = cfg.detect;
    if (key == "method") cfg.method = parse_method(value);
    else if (key == "epsilon") d.ransac.verify.epsilon = num();
    else if (key == "delta-deg") d.ransac.verify.delta = deg_to_rad(num());
    else if (key == "hypotheses") d.ransac.hypotheses = count();
    else if (key == "max-tilt-deg") d.ransac.max_tilt = deg_to_rad(num());
    else if (key == "seed") d.ransac.seed = count();
    else if (key == "grid-size") d.grid_size = count();
    else if (key == "min-quadrant-inliers") d.min_quadrant_inliers = static_cast<std::uint32_t>(count());
    else if (key == "crop-radius") d.crop_radius = num();
    else if (key == "downsample") d.downsample = num();
    else if (key == "beams") d.beams = static_cast<std::uint32_t>(count());
    else if (key == "azimuth-steps") d.azimuth_steps = static_cast<std::uint32_t>(count());
    else if (key == "max-gap") d.tangent.max_gap = static_cast<std::uint32_t>(count());
    else if (key == "max-chord") d.tangent.max_chord = num();
    else if (key == "min-baseline") d.tangent.min_baseline = num();
    else if (key == "max-stencil") d.tangent.max_stencil = static_cast<std::uint32_t>(count());
    else if (key == "lpr-iterations") cfg.lpr.num_iterations = count();
    else if (key == "lpr-count") cfg.lpr.num_lpr = count();
    else if (key == "lpr-margin") cfg.lpr.seed_height_margin = num();
    else throw Error("unknown config key '" + key + "'");
  }
}

/// Effective configuration as key=value lines (parsable by apply_key_values).
inline std::string format_config(const RunConfig& cfg) {
  const auto& d = cfg.detect;
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "method=%s\nepsilon=%.6g\ndelta-deg=%.6g\nhypotheses=%zu\nmax-tilt-deg=%.6g\n"
                "seed=%llu\ngrid-size=%zu\nmin-quadrant-inliers=%u\ncrop-radius=%.6g\n"
                "downsample=%.6g\nbeams=%u\nazimuth-steps=%u\nmax-gap=%u\nmax-chord=%.6g\n"
                "min-baseline=%.6g\nmax-stencil=%u\nlpr-iterations=%zu\nlpr-count=%zu\n"
                "lpr-margin=%.6g\n",
                to_string(cfg.method), d.ransac.verify.epsilon,
                rad_to_deg(d.ransac.verify.delta), d.ransac.hypotheses,
                rad_to_deg(d.ransac.max_tilt), static_cast<unsigned long long>(d.ransac.seed),
                d.grid_size, d.min_quadrant_inliers, d.crop_radius, d.downsample, d.beams,
                d.azimuth_steps, d.tangent.max_gap, d.tangent.max_chord, d.tangent.min_baseline,
                d.tangent.max_stencil, cfg.lpr.num_iterations, cfg.lpr.num_lpr,
                cfg.lpr.seed_height_margin);
  return buf;
}

/// Vanilla RANSAC over the crop: fit on the downsampled cloud, label the
/// cropped full-resolution cloud by distance to the winning plane.
inline GroundLabeling detect_vanilla(std::span<const Point> points, const DetectConfig& config) {
  const auto cropped = crop_radius(points, config.crop_radius);
  const auto fit = grid_downsample(cropped, config.downsample);
  const auto plane = fit_single_plane(fit, nullptr, config.ransac).plane;
  const auto mask = verify_distance(plane, cropped, config.ransac.verify.epsilon);
  GroundLabeling out;
  out.method = "vanilla";
  out.planes = {plane};
  out.fit_points = fit.size();
  for (std::size_t i = 0; i < cropped.size(); ++i) {
    out.point_ids.push_back(cropped[i].point_id);
    out.ground.push_back(mask.flags[i]);
  }
  return out;
}

/// Single plane chosen and applied with the tangent test (no partition).
inline GroundLabeling detect_tangent_plane(std::span<const Point> points,
                                           const DetectConfig& config) {
  const auto scan = organize(points, config.beams, config.azimuth_steps);
  const auto tangents = estimate_tangents(points, scan, config.tangent);
  const auto cropped = crop_radius(points, config.crop_radius);
  const auto fit = grid_downsample(cropped, config.downsample);
  const auto plane = fit_single_plane(fit, &tangents, config.ransac).plane;
  const auto mask = verify_tangent(plane, cropped, tangents, config.ransac.verify);
  GroundLabeling out;
  out.method = "tangent_plane";
  out.planes = {plane};
  out.fit_points = fit.size();
  for (std::size_t i = 0; i < cropped.size(); ++i) {
    out.point_ids.push_back(cropped[i].point_id);
    out.ground.push_back(mask.flags[i]);
  }
  return out;
}

inline GroundLabeling detect_lpr(std::span<const Point> points, const RunConfig& cfg) {
  const auto params = cfg.lpr_params();
  const auto cropped = crop_radius(points, cfg.detect.crop_radius);
  const auto fit = grid_downsample(cropped, cfg.detect.downsample);
  const auto planes = fit_lpr_planes(fit, params);
  auto out = label_lpr(cropped, planes, params);
  out.fit_points = fit.size();
  return out;
}

inline GroundLabeling run_method(std::span<const Point> points, const RunConfig& cfg) {
  switch (cfg.method) {
    case Method::proposed: return detect_ground(points, cfg.detect);
    case Method::vanilla: return detect_vanilla(points, cfg.detect);
    case Method::lpr: return detect_lpr(points, cfg);
  }
  throw Error("unknown method");
}

inline LabelTable to_label_table(const GroundLabeling& labeling) {
  return {labeling.point_ids, labeling.ground};
}

/// Structured key=value description of the fitted model followed by the
/// effective configuration.
inline std::string format_sidecar(const GroundLabeling& labeling, const RunConfig& cfg) {
  std::string out;
  char buf[256];
  const auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  line("method=%s\n", labeling.method.c_str());
  line("points=%zu\n", labeling.point_ids.size());
  line("fit_points=%zu\n", labeling.fit_points);
  line("ground_points=%zu\n", labeling.ground_count());
  line("fallback=%d\n", labeling.fallback ? 1 : 0);
  line("feasible=%d\n", labeling.partition ? 1 : 0);
  if (labeling.partition) {
    const auto& p = *labeling.partition;
    const double bin = labeling.bounds.side() / static_cast<double>(labeling.bins);
    line("cross_center_c=%zu\n", p.center_c);
    line("cross_center_r=%zu\n", p.center_r);
    line("cross_center_x=%.6f\n", labeling.bounds.min_x() + bin * static_cast<double>(p.center_c));
    line("cross_center_y=%.6f\n", labeling.bounds.min_y() + bin * static_cast<double>(p.center_r));
    for (std::size_t s = 0; s < 4; ++s) {
      const auto& pl = labeling.planes[s];
      line("plane_%s=%.9f %.9f %.9f %.9f\n", kQuadrantNames[s], pl.normal.x(), pl.normal.y(),
           pl.normal.z(), pl.offset);
      line("hypothesis_%s=%zu\n", kQuadrantNames[s], p.plane_index[s]);
      line("inliers_%s=%u\n", kQuadrantNames[s], p.quadrant_inliers[s]);
    }
    line("best_sum=%llu\n", static_cast<unsigned long long>(p.best_sum));
  } else {
    for (std::size_t i = 0; i < labeling.planes.size(); ++i) {
      const auto& pl = labeling.planes[i];
      line("plane_%zu=%.9f %.9f %.9f %.9f\n", i, pl.normal.x(), pl.normal.y(), pl.normal.z(),
           pl.offset);
    }
  }
  out += "# effective configuration\n";
  out += format_config(cfg);
  return out;
}

}  // namespace groundfit
