#pragma once

// Plain-text formats: point-cloud CSV, flat key=value files, and the
// ground-labeling CSV.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "groundfit/types.hpp"

namespace groundfit {
namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

// Locale-independent fixed formatting with six decimals.
inline void append_fixed(std::string& out, double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", v);
  // Values that round to zero print without a sign.
  const bool neg_zero = buf[0] == '-' && std::strspn(buf + 1, "0.") == static_cast<std::size_t>(n - 1);
  out.append(buf + (neg_zero ? 1 : 0), static_cast<std::size_t>(n - (neg_zero ? 1 : 0)));
}

}  // namespace detail

/// Parses `x,y,z,beam,azimuth_step[,label]` rows. A first line whose first
/// field is not numeric is treated as a header. Blank lines are skipped;
/// point_id is the index of the data row.
inline Cloud parse_cloud(std::istream& in, std::uint32_t beams = kDefaultBeams,
                         std::uint32_t azimuth_steps = kDefaultAzimuthSteps) {
  Cloud cloud;
  std::string line;
  std::size_t line_no = 0;
  bool any_label = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto fields = detail::split(text, ',');
    if (line_no == 1 && !detail::parse_number<double>(fields[0])) continue;

    if (fields.size() != 5 && fields.size() != 6) {
      throw ParseError("expected 5 or 6 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Point p;
    const auto x = detail::parse_number<double>(fields[0]);
    const auto y = detail::parse_number<double>(fields[1]);
    const auto z = detail::parse_number<double>(fields[2]);
    if (!x || !y || !z) throw ParseError("malformed coordinate", line_no);
    if (!std::isfinite(*x) || !std::isfinite(*y) || !std::isfinite(*z)) {
      throw ParseError("non-finite coordinate", line_no);
    }
    const auto beam = detail::parse_number<std::uint32_t>(fields[3]);
    const auto step = detail::parse_number<std::uint32_t>(fields[4]);
    if (!beam || !step) throw ParseError("malformed beam/azimuth index", line_no);
    if (*beam >= beams) throw ParseError("beam out of range", line_no);
    if (*step >= azimuth_steps) {
      throw ParseError("azimuth_step out of range", line_no);
    }
    p.x = *x;
    p.y = *y;
    p.z = *z;
    p.beam = *beam;
    p.azimuth_step = *step;
    p.point_id = cloud.points.size();

    std::int8_t label = -1;
    if (fields.size() == 6 && !fields[5].empty()) {
      const auto l = detail::parse_number<int>(fields[5]);
      if (!l || (*l != 0 && *l != 1)) throw ParseError("label must be 0 or 1", line_no);
      label = static_cast<std::int8_t>(*l);
      any_label = true;
    }
    cloud.points.push_back(p);
    cloud.labels.push_back(label);
  }
  if (!any_label) cloud.labels.clear();
  return cloud;
}

inline Cloud load_cloud(const std::string& path,
                        std::uint32_t beams = kDefaultBeams,
                        std::uint32_t azimuth_steps = kDefaultAzimuthSteps) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return parse_cloud(in, beams, azimuth_steps);
}

inline std::string format_cloud(const Cloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 48);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    detail::append_fixed(out, p.x);
    out += ',';
    detail::append_fixed(out, p.y);
    out += ',';
    detail::append_fixed(out, p.z);
    out += ',';
    out += std::to_string(p.beam);
    out += ',';
    out += std::to_string(p.azimuth_step);
    if (cloud.has_labels() && cloud.labels[i] >= 0) {
      out += ',';
      out += std::to_string(cloud.labels[i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

inline void save_cloud(const std::string& path, const Cloud& cloud) {
  write_text(path, format_cloud(cloud));
}

// ---------------------------------------------------------------------------
// Flat key=value text. '#' starts a comment; keys are case-sensitive.

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = line.substr(0, line.find('#'));
    const auto body = detail::trim(text);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    const auto key = detail::trim(body.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[std::string(key)] = std::string(detail::trim(body.substr(eq + 1)));
  }
  return kv;
}

inline KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return parse_key_values(in);
}

// ---------------------------------------------------------------------------
// Per-point binary labels keyed by point_id.

struct LabelTable {
  std::vector<std::size_t> ids;
  std::vector<std::uint8_t> values;
};

inline std::string format_labels(const LabelTable& table) {
  std::string out = "point_id,ground\n";
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    out += std::to_string(table.ids[i]);
    out += table.values[i] ? ",1\n" : ",0\n";
  }
  return out;
}

/// Reads either a `point_id,ground` labeling file or a labeled point-cloud
/// CSV (whose label column is used, keyed by row index).
inline LabelTable parse_labels(std::istream& in) {
  LabelTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto fields = detail::split(text, ',');
    if (line_no == 1 && !detail::parse_number<double>(fields[0])) continue;
    const std::size_t this_row = row++;
    if (fields.size() == 2) {
      const auto id = detail::parse_number<std::size_t>(fields[0]);
      const auto v = detail::parse_number<int>(fields[1]);
      if (!id || !v || (*v != 0 && *v != 1)) throw ParseError("malformed label row", line_no);
      table.ids.push_back(*id);
      table.values.push_back(static_cast<std::uint8_t>(*v));
    } else if (fields.size() == 6) {
      if (fields[5].empty()) continue;
      const auto v = detail::parse_number<int>(fields[5]);
      if (!v || (*v != 0 && *v != 1)) throw ParseError("label must be 0 or 1", line_no);
      table.ids.push_back(this_row);
      table.values.push_back(static_cast<std::uint8_t>(*v));
    } else if (fields.size() == 5) {
      continue;  // unlabeled cloud row
    } else {
      throw ParseError("expected 2 (labeling) or 6 (cloud) fields", line_no);
    }
  }
  return table;
}

inline LabelTable load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return parse_labels(in);
}

}  // namespace groundfit
