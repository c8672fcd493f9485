#pragma once

// Synthetic spinning-lidar raycaster over scenes built from rectangles,
// boxes and walls. Every return carries the ground label of the surface it
// hit, which makes simulated clouds usable as ground truth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "groundfit/io.hpp"
#include "groundfit/types.hpp"

namespace groundfit {

struct LidarConfig {
  std::vector<double> beam_elevations_deg = default_elevations();
  double azimuth_resolution_deg = 0.2;
  double sensor_height = 1.8;
  double max_range = 100.0;
  double noise_sigma = 0.01;  // along-ray range noise, meters

  std::uint32_t beams() const {
    return static_cast<std::uint32_t>(beam_elevations_deg.size());
  }
  std::uint32_t azimuth_steps() const {
    return static_cast<std::uint32_t>(std::lround(360.0 / azimuth_resolution_deg));
  }

  void validate() const {
    if (!(azimuth_resolution_deg > 0.0)) throw Error("azimuth resolution must be positive");
    if (beam_elevations_deg.empty()) throw Error("lidar needs at least one beam");
    for (std::size_t i = 1; i < beam_elevations_deg.size(); ++i) {
      if (!(beam_elevations_deg[i] > beam_elevations_deg[i - 1])) {
        throw Error("beam elevations must be strictly increasing");
      }
    }
    if (!(max_range > 0.0)) throw Error("max range must be positive");
    if (noise_sigma < 0.0) throw Error("noise sigma must be non-negative");
  }

  // VLP-16: -15 to +15 degrees in 2 degree steps.
  static std::vector<double> default_elevations() {
    std::vector<double> e;
    for (int i = 0; i < 16; ++i) e.push_back(-15.0 + 2.0 * i);
    return e;
  }
};

enum class ElementKind { ground_plane, ramp, box, wall };

inline const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::ground_plane: return "ground_plane";
    case ElementKind::ramp: return "ramp";
    case ElementKind::box: return "box";
    case ElementKind::wall: return "wall";
  }
  return "?";
}

/// One scene surface.
///
/// ground_plane / ramp: the plane n.x + d = 0 restricted to the horizontal
/// rectangle x_range x y_range. box: footprint of size_x x size_y centered at
/// (center_x, center_y), rotated by yaw, spanning z_range. wall: vertical
/// rectangle over the segment start..end spanning z_range.
struct SceneElement {
  ElementKind kind = ElementKind::ground_plane;
  bool is_ground = true;

  PlaneHypothesis plane;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;

  double center_x = 0.0, center_y = 0.0, size_x = 0.0, size_y = 0.0;
  double yaw_deg = 0.0;

  double start_x = 0.0, start_y = 0.0, end_x = 0.0, end_y = 0.0;
  double z_min = 0.0, z_max = 0.0;

  static SceneElement ground(double x0, double x1, double y0, double y1,
                             double z = 0.0) {
    SceneElement e;
    e.kind = ElementKind::ground_plane;
    e.plane = {Vec3::UnitZ(), -z};
    e.x_min = x0, e.x_max = x1, e.y_min = y0, e.y_max = y1;
    return e;
  }

  /// Plane through `origin` rising at `grade_deg` along compass heading
  /// `heading_deg` (0 = +x, 90 = +y), clipped to the given rectangle.
  static SceneElement ramp(double x0, double x1, double y0, double y1,
                           const Vec3& origin, double heading_deg,
                           double grade_deg) {
    constexpr double kDeg = std::numbers::pi / 180.0;
    const double slope = std::tan(grade_deg * kDeg);
    const Vec3 n = Vec3(-slope * std::cos(heading_deg * kDeg),
                        -slope * std::sin(heading_deg * kDeg), 1.0)
                       .normalized();
    SceneElement e;
    e.kind = ElementKind::ramp;
    e.plane = PlaneHypothesis{n, -n.dot(origin)}.canonical();
    e.x_min = x0, e.x_max = x1, e.y_min = y0, e.y_max = y1;
    return e;
  }

  static SceneElement box(double cx, double cy, double sx, double sy,
                          double z0, double z1, double yaw_deg = 0.0) {
    SceneElement e;
    e.kind = ElementKind::box;
    e.is_ground = false;
    e.center_x = cx, e.center_y = cy, e.size_x = sx, e.size_y = sy;
    e.z_min = z0, e.z_max = z1, e.yaw_deg = yaw_deg;
    return e;
  }

  static SceneElement wall(double x0, double y0, double x1, double y1,
                           double z0, double z1) {
    SceneElement e;
    e.kind = ElementKind::wall;
    e.is_ground = false;
    e.start_x = x0, e.start_y = y0, e.end_x = x1, e.end_y = y1;
    e.z_min = z0, e.z_max = z1;
    return e;
  }

  // Distance along the unit ray to the first hit, if any.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir) const;

  // Slope from horizontal in degrees (planar kinds only).
  double slope_deg() const {
    return std::acos(std::clamp(std::abs(plane.normal.z()), 0.0, 1.0)) * 180.0 /
           std::numbers::pi;
  }

  void validate() const;
};

struct Scene {
  std::vector<SceneElement> elements;

  void validate() const {
    if (elements.empty()) throw Error("scene has no elements");
    bool ground = false;
    for (const auto& e : elements) {
      e.validate();
      ground = ground || e.is_ground;
    }
    if (!ground) throw Error("scene has no ground element");
  }
};

/// Casts one ray per (beam, azimuth step) from (0, 0, sensor_height) and
/// keeps the nearest hit within max_range. Output is beam-major, labels are
/// taken from the hit element. Deterministic in `seed`. When `hit_elements`
/// is given it receives, per point, the index of the element that was hit.
inline Cloud raycast(const Scene& scene, const LidarConfig& lidar,
                     std::uint64_t seed,
                     std::vector<std::uint32_t>* hit_elements = nullptr) {
  scene.validate();
  lidar.validate();
  constexpr double kDeg = std::numbers::pi / 180.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  const Vec3 origin(0.0, 0.0, lidar.sensor_height);
  const std::uint32_t cols = lidar.azimuth_steps();
  std::vector<double> cos_az(cols), sin_az(cols);
  for (std::uint32_t c = 0; c < cols; ++c) {
    const double az = c * lidar.azimuth_resolution_deg * kDeg;
    cos_az[c] = std::cos(az);
    sin_az[c] = std::sin(az);
  }

  if (hit_elements) hit_elements->clear();
  Cloud cloud;
  cloud.points.reserve(std::size_t{lidar.beams()} * cols);
  cloud.labels.reserve(std::size_t{lidar.beams()} * cols);
  for (std::uint32_t b = 0; b < lidar.beams(); ++b) {
    const double el = lidar.beam_elevations_deg[b] * kDeg;
    const double ce = std::cos(el), se = std::sin(el);
    for (std::uint32_t c = 0; c < cols; ++c) {
      const Vec3 dir(ce * cos_az[c], ce * sin_az[c], se);
      double best = std::numeric_limits<double>::infinity();
      const SceneElement* hit = nullptr;
      for (const auto& e : scene.elements) {
        const auto t = e.intersect(origin, dir);
        if (t && *t < best) {
          best = *t;
          hit = &e;
        }
      }
      if (!hit || best > lidar.max_range) continue;
      const double range =
          lidar.noise_sigma > 0.0 ? best + lidar.noise_sigma * noise(rng) : best;
      const Vec3 p = origin + range * dir;
      Point pt;
      pt.x = p.x();
      pt.y = p.y();
      pt.z = p.z();
      pt.beam = b;
      pt.azimuth_step = c;
      pt.point_id = cloud.points.size();
      cloud.points.push_back(pt);
      cloud.labels.push_back(hit->is_ground ? 1 : 0);
      if (hit_elements) {
        hit_elements->push_back(static_cast<std::uint32_t>(hit - scene.elements.data()));
      }
    }
  }
  return cloud;
}

// ---------------------------------------------------------------------------

inline std::optional<double> SceneElement::intersect(const Vec3& o,
                                                     const Vec3& d) const {
  constexpr double kMinT = 1e-9;
  switch (kind) {
    case ElementKind::ground_plane:
    case ElementKind::ramp: {
      const double denom = plane.normal.dot(d);
      if (std::abs(denom) < 1e-12) return std::nullopt;
      const double t = -(plane.normal.dot(o) + plane.offset) / denom;
      if (t <= kMinT) return std::nullopt;
      const Vec3 p = o + t * d;
      if (p.x() < x_min || p.x() > x_max || p.y() < y_min || p.y() > y_max) {
        return std::nullopt;
      }
      return t;
    }
    case ElementKind::wall: {
      // Vertical plane through the segment; normal is horizontal.
      const Vec3 a(start_x, start_y, 0.0);
      const Vec3 seg(end_x - start_x, end_y - start_y, 0.0);
      const Vec3 n(-seg.y(), seg.x(), 0.0);
      const double denom = n.dot(d);
      if (std::abs(denom) < 1e-12) return std::nullopt;
      const double t = n.dot(a - o) / denom;
      if (t <= kMinT) return std::nullopt;
      const Vec3 p = o + t * d;
      const double s = (p - a).dot(seg) / seg.squaredNorm();
      if (s < 0.0 || s > 1.0 || p.z() < z_min || p.z() > z_max) return std::nullopt;
      return t;
    }
    case ElementKind::box: {
      const double yaw = yaw_deg * std::numbers::pi / 180.0;
      const double cy = std::cos(yaw), sy = std::sin(yaw);
      // Rotate the ray into the box frame.
      const double ox = o.x() - center_x, oy = o.y() - center_y;
      const double lo[3] = {-0.5 * size_x, -0.5 * size_y, z_min};
      const double hi[3] = {0.5 * size_x, 0.5 * size_y, z_max};
      const double ro[3] = {cy * ox + sy * oy, -sy * ox + cy * oy, o.z()};
      const double rd[3] = {cy * d.x() + sy * d.y(), -sy * d.x() + cy * d.y(), d.z()};
      double t0 = -std::numeric_limits<double>::infinity();
      double t1 = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 3; ++k) {
        if (std::abs(rd[k]) < 1e-15) {
          if (ro[k] < lo[k] || ro[k] > hi[k]) return std::nullopt;
          continue;
        }
        double a = (lo[k] - ro[k]) / rd[k];
        double b = (hi[k] - ro[k]) / rd[k];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
      }
      if (t0 > t1 || t0 <= kMinT) return std::nullopt;
      return t0;
    }
  }
  return std::nullopt;
}

inline void SceneElement::validate() const {
  switch (kind) {
    case ElementKind::ground_plane:
    case ElementKind::ramp:
      if (!(x_max > x_min) || !(y_max > y_min)) throw Error("plane element has empty extent");
      if (std::abs(plane.normal.norm() - 1.0) > 1e-9) throw Error("plane normal must be unit");
      break;
    case ElementKind::box:
      if (!(size_x > 0.0) || !(size_y > 0.0) || !(z_max > z_min)) {
        throw Error("box has empty extent");
      }
      break;
    case ElementKind::wall:
      if (start_x == end_x && start_y == end_y) throw Error("wall has zero length");
      if (!(z_max > z_min)) throw Error("wall has empty height");
      break;
  }
  if (is_ground) {
    if (kind == ElementKind::box || kind == ElementKind::wall) {
      throw Error("only planar elements may be ground");
    }
    if (slope_deg() > 30.0 + 1e-9) throw Error("ground element steeper than 30 degrees");
  }
}

// ---------------------------------------------------------------------------
// Canonical scenes. Non-flat scenes sit inside a 30 m tall courtyard of
// walls at +-50 m so that upward beams return; those walls lie outside the
// default 40 m crop.

namespace detail {

inline void add_courtyard(Scene& s) {
  constexpr double h = 50.0;
  s.elements.push_back(SceneElement::wall(-h, -h, h, -h, -5.0, 30.0));
  s.elements.push_back(SceneElement::wall(h, -h, h, h, -5.0, 30.0));
  s.elements.push_back(SceneElement::wall(h, h, -h, h, -5.0, 30.0));
  s.elements.push_back(SceneElement::wall(-h, h, -h, -h, -5.0, 30.0));
}

}  // namespace detail

inline std::map<std::string, Scene> canonical_scenes() {
  std::map<std::string, Scene> scenes;

  {
    Scene s;
    s.elements.push_back(SceneElement::ground(-120, 120, -120, 120));
    scenes["flat"] = s;
  }
  {
    // Flat ground up to y = 5, a 24 degree slope rising to the left, and a
    // wall where the slope ends. A low planter sits on the flat side.
    Scene s;
    constexpr double fold = 5.0, top = 14.0, grade = 24.0;
    const double top_z = (top - fold) * std::tan(grade * std::numbers::pi / 180.0);
    s.elements.push_back(SceneElement::ground(-50, 50, -50, fold));
    s.elements.push_back(
        SceneElement::ramp(-50, 50, fold, top, Vec3(0, fold, 0), 90.0, grade));
    s.elements.push_back(SceneElement::wall(-50, top, 50, top, top_z - 1.0, top_z + 3.0));
    s.elements.push_back(SceneElement::box(0.0, -10.0, 30.0, 1.0, 0.0, 0.35));
    detail::add_courtyard(s);
    scenes["two_slope_wall"] = s;
  }
  {
    // A wide ramp climbing at 7 degrees over the front-left quarter, with a
    // retaining wall along its right edge.
    Scene s;
    constexpr double x0 = 6.0, y0 = 2.0, grade = 7.0;
    const double top_z = (50.0 - x0) * std::tan(grade * std::numbers::pi / 180.0);
    s.elements.push_back(SceneElement::ground(-50, 50, -50, y0));
    s.elements.push_back(SceneElement::ground(-50, x0, y0, 50));
    s.elements.push_back(SceneElement::ramp(x0, 50, y0, 50, Vec3(x0, 0, 0), 0.0, grade));
    s.elements.push_back(SceneElement::wall(x0, y0, 50, y0, -1.0, top_z));
    detail::add_courtyard(s);
    scenes["sloped_lane"] = s;
  }
  {
    // The road falls away at 2 degrees beyond 12 m; a raised trailer
    // stands on it 35 m ahead.
    Scene s;
    constexpr double fold = 12.0, grade = -2.0;
    const double z35 = (35.0 - fold) * std::tan(grade * std::numbers::pi / 180.0);
    s.elements.push_back(SceneElement::ground(-50, fold, -50, 50));
    s.elements.push_back(
        SceneElement::ramp(fold, 50, -50, 50, Vec3(fold, 0, 0), 0.0, grade));
    s.elements.push_back(SceneElement::box(36.25, 0.0, 2.5, 8.0, z35 + 0.3, z35 + 3.0));
    detail::add_courtyard(s);
    scenes["far_obstacle"] = s;
  }
  {
    // Parked cars on both sides of the road.
    Scene s;
    s.elements.push_back(SceneElement::ground(-50, 50, -50, 50));
    for (int side : {-1, 1}) {
      for (int k = -3; k <= 3; ++k) {
        const double cx = k * 8.0 + (side > 0 ? 3.0 : 0.0);
        const double height = 1.4 + 0.15 * ((k + 3 + (side > 0 ? 1 : 0)) % 4);
        s.elements.push_back(SceneElement::box(cx, side * 4.5, 4.5, 1.8, 0.2, height));
      }
    }
    detail::add_courtyard(s);
    scenes["crowded"] = s;
  }
  {
    // A 0.6 m fence 15 m ahead with a gentle rise behind it.
    Scene s;
    s.elements.push_back(SceneElement::ground(-50, 15, -50, 50));
    s.elements.push_back(
        SceneElement::ramp(15, 50, -50, 50, Vec3(15, 0, 0), 0.0, 3.0));
    s.elements.push_back(SceneElement::wall(15.0, -20.0, 15.0, 20.0, -0.5, 0.6));
    detail::add_courtyard(s);
    scenes["low_fence"] = s;
  }
  {
    // Crowned road: the right half (y < 0) falls away at 3 degrees.
    Scene s;
    s.elements.push_back(SceneElement::ground(-50, 50, 0, 50));
    s.elements.push_back(
        SceneElement::ramp(-50, 50, -50, 0, Vec3(0, 0, 0), 90.0, 3.0));
    detail::add_courtyard(s);
    scenes["tilted_ground"] = s;
  }
  return scenes;
}

// ---------------------------------------------------------------------------
// Scene files.
//
//   # comment
//   [element]
//   kind = ground_plane | ramp | box | wall
//   ground = 1 | 0                 (default: 1 for planes, 0 otherwise)
//   ground_plane: normal = nx ny nz ; offset = d ; x_range = a b ; y_range = a b
//   ramp:   origin = x y z ; heading_deg = h ; grade_deg = g ; x_range ; y_range
//   box:    center = x y ; size = sx sy ; z_range = a b ; yaw_deg = w
//   wall:   start = x y ; end = x y ; z_range = a b
//
// Every element starts with an `[element]` line.

namespace detail {

inline std::vector<double> parse_doubles(const std::string& v, std::size_t n,
                                         std::size_t line) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) {
    const auto x = parse_number<double>(tok);
    if (!x || !std::isfinite(*x)) throw ParseError("bad number '" + tok + "'", line);
    out.push_back(*x);
  }
  if (out.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " numbers", line);
  }
  return out;
}

inline SceneElement build_element(const std::map<std::string, std::string>& kv,
                                  std::size_t line) {
  const auto get = [&](const std::string& key, std::size_t n) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("element missing '" + key + "'", line);
    return parse_doubles(it->second, n, line);
  };
  const auto it = kv.find("kind");
  if (it == kv.end()) throw ParseError("element missing 'kind'", line);
  const std::string& kind = it->second;

  SceneElement e;
  if (kind == "ground_plane") {
    const auto n = get("normal", 3);
    const auto d = get("offset", 1);
    const auto xr = get("x_range", 2);
    const auto yr = get("y_range", 2);
    const Vec3 normal(n[0], n[1], n[2]);
    if (normal.norm() == 0.0) throw ParseError("zero normal", line);
    e = SceneElement::ground(xr[0], xr[1], yr[0], yr[1]);
    e.plane = PlaneHypothesis{normal.normalized(), d[0] / normal.norm()}.canonical();
  } else if (kind == "ramp") {
    const auto o = get("origin", 3);
    const auto xr = get("x_range", 2);
    const auto yr = get("y_range", 2);
    e = SceneElement::ramp(xr[0], xr[1], yr[0], yr[1], Vec3(o[0], o[1], o[2]),
                           get("heading_deg", 1)[0], get("grade_deg", 1)[0]);
  } else if (kind == "box") {
    const auto c = get("center", 2);
    const auto s = get("size", 2);
    const auto z = get("z_range", 2);
    const double yaw = kv.count("yaw_deg") ? get("yaw_deg", 1)[0] : 0.0;
    e = SceneElement::box(c[0], c[1], s[0], s[1], z[0], z[1], yaw);
  } else if (kind == "wall") {
    const auto a = get("start", 2);
    const auto b = get("end", 2);
    const auto z = get("z_range", 2);
    e = SceneElement::wall(a[0], a[1], b[0], b[1], z[0], z[1]);
  } else {
    throw ParseError("unknown element kind '" + kind + "'", line);
  }
  if (const auto g = kv.find("ground"); g != kv.end()) {
    if (g->second != "0" && g->second != "1") throw ParseError("ground must be 0 or 1", line);
    e.is_ground = g->second == "1";
  }
  return e;
}

}  // namespace detail

inline Scene parse_scene(std::istream& in) {
  Scene scene;
  std::map<std::string, std::string> current;
  bool open = false;
  std::size_t open_line = 0;
  std::string line;
  std::size_t line_no = 0;

  const auto flush = [&] {
    if (open) scene.elements.push_back(detail::build_element(current, open_line));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    if (body == "[element]") {
      flush();
      open = true;
      open_line = line_no;
      continue;
    }
    if (!open) throw ParseError("key outside of an [element] block", line_no);
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    current[std::string(detail::trim(body.substr(0, eq)))] =
        std::string(detail::trim(body.substr(eq + 1)));
  }
  flush();
  try {
    scene.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }
  return scene;
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return parse_scene(in);
}

}  // namespace groundfit
