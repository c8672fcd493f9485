#pragma once

#include <map>
#include <string>
#include <vector>

#include "groundfit/groundfit.hpp"

namespace testing_support {

inline groundfit::Point make_point(double x, double y, double z, std::uint32_t beam = 0,
                                   std::uint32_t col = 0, std::size_t id = 0) {
  groundfit::Point p;
  p.x = x;
  p.y = y;
  p.z = z;
  p.beam = beam;
  p.azimuth_step = col;
  p.point_id = id;
  return p;
}

// Canonical scenes are reused across tests; simulate each once.
inline const groundfit::Cloud& scene_cloud(const std::string& name, std::uint64_t seed = 1) {
  static std::map<std::pair<std::string, std::uint64_t>, groundfit::Cloud> cache;
  auto key = std::make_pair(name, seed);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const auto scene = groundfit::canonical_scenes().at(name);
    it = cache.emplace(key, groundfit::raycast(scene, groundfit::LidarConfig{}, seed)).first;
  }
  return it->second;
}

}  // namespace testing_support
