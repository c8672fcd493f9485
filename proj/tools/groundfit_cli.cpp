// groundfit: simulate scans, detect ground, score labelings, time methods.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "groundfit/groundfit.hpp"

namespace {

using namespace groundfit;

constexpr int kExitInput = 2;

// Flags that map one-to-one onto config keys. Values stay strings here and
// are checked by apply_key_values, so a flag and a config line behave alike.
struct DetectFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    options.emplace_back(key, app->add_option("--" + key, values[key], help));
  }

  void add_all(CLI::App* app, bool with_method) {
    app->add_option("--config", config_path, "key=value file; flags override it");
    if (with_method) add(app, "method", "proposed | vanilla | lpr");
    add(app, "seed", "RANSAC seed");
    add(app, "epsilon", "distance threshold, m (default 0.2)");
    add(app, "delta-deg", "tangent angle threshold, deg (default 10)");
    add(app, "hypotheses", "plane hypotheses M (default 200)");
    add(app, "grid-size", "bins per side B (default 80)");
    add(app, "min-quadrant-inliers", "per-quadrant minimum T (default 50)");
    add(app, "crop-radius", "m (default 40)");
    add(app, "downsample", "grid cell, m (default 0.1)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) apply_key_values(cfg, load_key_values(config_path));
    KeyValues given;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) given[key] = values.at(key);
    }
    apply_key_values(cfg, given);
    cfg.detect.ransac.verify.validate();
    return cfg;
  }
};

std::string scene_list() {
  std::string out;
  for (const auto& [name, scene] : canonical_scenes()) out += (out.empty() ? "" : ", ") + name;
  return out;
}

int cmd_simulate(const std::string& scene_name, const std::string& scene_file,
                 std::uint64_t seed, double noise_sigma, const std::string& out) {
  Scene scene;
  if (!scene_file.empty()) {
    scene = load_scene(scene_file);
  } else {
    const auto scenes = canonical_scenes();
    const auto it = scenes.find(scene_name);
    if (it == scenes.end()) {
      std::cerr << "error: unknown scene '" << scene_name << "'; available: " << scene_list()
                << "\n";
      return kExitInput;
    }
    scene = it->second;
  }
  LidarConfig lidar;
  lidar.noise_sigma = noise_sigma;
  const auto cloud = raycast(scene, lidar, seed);
  save_cloud(out, cloud);
  std::cout << "wrote " << cloud.size() << " points to " << out << "\n";
  return 0;
}

void dump_tangents(const std::string& path, std::span<const Point> points,
                   const DetectConfig& cfg) {
  const auto scan = organize(points, cfg.beams, cfg.azimuth_steps);
  const auto tangents = estimate_tangents(points, scan, cfg.tangent);
  std::string text = "point_id,tx,ty,tz\n";
  char buf[128];
  for (const auto& p : points) {
    if (!tangents.has(p.point_id)) continue;
    const Vec3& t = tangents[p.point_id];
    std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9f,%.9f\n", p.point_id, t.x(), t.y(), t.z());
    text += buf;
  }
  write_text(path, text);
}

int cmd_detect(const std::string& input, const DetectFlags& flags, const std::string& out,
               const std::string& tangent_path) {
  const auto cfg = flags.resolve();
  std::cout << "# effective configuration\n" << format_config(cfg);
  const auto cloud = load_cloud(input, cfg.detect.beams, cfg.detect.azimuth_steps);
  if (!tangent_path.empty()) dump_tangents(tangent_path, cloud.points, cfg.detect);
  const auto labeling = run_method(cloud.points, cfg);
  if (labeling.fallback) {
    std::cerr << "warning: no cross partition satisfies min-quadrant-inliers="
              << cfg.detect.min_quadrant_inliers << "; used the single best plane\n";
  }
  write_text(out, format_labels(to_label_table(labeling)));
  write_text(out + ".meta", format_sidecar(labeling, cfg));
  std::cout << "ground " << labeling.ground_count() << " of " << labeling.point_ids.size()
            << " points; wrote " << out << " and " << out << ".meta\n";
  return 0;
}

int cmd_evaluate(const std::string& pred, const std::string& truth, bool csv) {
  const auto m = score(load_labels(pred), load_labels(truth));
  if (csv) {
    std::cout << metrics_csv_header() << metrics_csv_row(m);
  } else {
    std::cout << format_metrics(m);
  }
  return 0;
}

int cmd_bench(const std::string& input, const DetectFlags& flags,
              const std::vector<std::string>& methods, std::size_t runs, bool csv) {
  if (runs == 0) {
    std::cerr << "error: --runs must be at least 1\n";
    return kExitInput;
  }
  auto cfg = flags.resolve();
  const auto cloud = load_cloud(input, cfg.detect.beams, cfg.detect.azimuth_steps);
  std::vector<BenchReport> reports;
  for (const auto& name : methods) {
    cfg.method = parse_method(name);
    reports.push_back(bench(cloud.points, cfg, runs));
  }
  if (csv) {
    std::cout << bench_csv_header();
    for (const auto& r : reports) std::cout << bench_csv_row(r);
    return 0;
  }
  std::printf("%-10s %6s %10s %10s %8s %10s  %s\n", "method", "runs", "mean_ms", "p95_ms",
              "points", "fit_points", "config");
  for (const auto& r : reports) {
    std::printf("%-10s %6zu %10.2f %10.2f %8zu %10zu  %016llx\n", to_string(r.method), r.runs,
                r.mean_ms, r.p95_ms, r.point_count, r.fit_points,
                static_cast<unsigned long long>(r.config_hash));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground plane detection for spinning-lidar scans"};
  app.require_subcommand(1);

  std::string scene_name, scene_file, out = "cloud.csv";
  std::uint64_t sim_seed = 1;
  double noise_sigma = LidarConfig{}.noise_sigma;
  auto* sim = app.add_subcommand("simulate", "raycast a scene into a labeled cloud CSV");
  auto* scene_opt = sim->add_option("--scene", scene_name, "canonical scene name");
  sim->add_option("--scene-file", scene_file, "scene description file")->excludes(scene_opt);
  sim->add_option("--seed", sim_seed, "noise seed");
  sim->add_option("--noise-sigma", noise_sigma, "range noise, m");
  sim->add_option("-o,--out", out, "output CSV");

  std::string detect_in, detect_out = "labels.csv", tangent_path;
  DetectFlags detect_flags;
  auto* det = app.add_subcommand("detect", "label the ground points of a cloud");
  det->add_option("input", detect_in, "point-cloud CSV")->required();
  detect_flags.add_all(det, true);
  det->add_option("-o,--out", detect_out, "labeling CSV; the sidecar goes to <out>.meta");
  det->add_option("--dump-tangents", tangent_path, "write per-point scan-line tangents");

  std::string pred, truth;
  bool eval_csv = false;
  auto* ev = app.add_subcommand("evaluate", "score a labeling against a labeled cloud");
  ev->add_option("prediction", pred, "labeling CSV")->required();
  ev->add_option("truth", truth, "labeled cloud or labeling CSV")->required();
  ev->add_flag("--csv", eval_csv, "one CSV row instead of key=value lines");

  std::string bench_in;
  DetectFlags bench_flags;
  std::vector<std::string> bench_methods{"proposed", "vanilla", "lpr"};
  std::size_t runs = 20;
  bool bench_csv = false;
  auto* be = app.add_subcommand("bench", "time the detection methods");
  be->add_option("input", bench_in, "point-cloud CSV")->required();
  bench_flags.add_all(be, false);
  be->add_option("--method", bench_methods, "methods to time (repeatable)");
  be->add_option("--runs", runs, "timed runs per method");
  be->add_flag("--csv", bench_csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*sim) {
      if (scene_name.empty() && scene_file.empty()) {
        std::cerr << "error: give --scene or --scene-file; available scenes: " << scene_list()
                  << "\n";
        return kExitInput;
      }
      return cmd_simulate(scene_name, scene_file, sim_seed, noise_sigma, out);
    }
    if (*det) return cmd_detect(detect_in, detect_flags, detect_out, tangent_path);
    if (*ev) return cmd_evaluate(pred, truth, eval_csv);
    if (*be) return cmd_bench(bench_in, bench_flags, bench_methods, runs, bench_csv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
