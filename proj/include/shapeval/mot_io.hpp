#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shapeval/geometry.hpp"
#include "shapeval/json_out.hpp"
#include "shapeval/track_metrics.hpp"

namespace shapeval {

struct TrackFile {
  TrackSet tracks;
  std::size_t record_count = 0;
};

namespace detail {

inline std::runtime_error line_error(std::size_t line, const std::string& what) {
  return std::runtime_error("line " + std::to_string(line) + ": " + what);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return fields;
}

inline std::int64_t parse_int_field(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw line_error(line, std::string(what) + " is not an integer: '" + s + "'");
  }
}

inline double parse_double_field(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw line_error(line, std::string(what) + " is not a number: '" + s + "'");
  }
}

}  // namespace detail

// Reads comma-separated track states, one per line:
//   frame, id, x, y, width, height [, confidence [, ignored...]]
// Frames are clamped to the observed range; a confidence in (0, 1] becomes
// the state's score and any other confidence (e.g. the conventional -1) is
// dropped. A repeated (frame, id) pair is an error. Blank lines and lines
// starting with '#' are skipped.
inline TrackFile load_tracks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::int64_t, Track> by_label;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  TrackFile out;
  int t_min = 0, t_max = -1;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() < 6)
      throw detail::line_error(line_no,
                               "expected at least frame, id, x, y, width, height fields");
    std::int64_t frame = detail::parse_int_field(fields[0], line_no, "frame");
    std::int64_t id = detail::parse_int_field(fields[1], line_no, "id");
    double x = detail::parse_double_field(fields[2], line_no, "x");
    double y = detail::parse_double_field(fields[3], line_no, "y");
    double w = detail::parse_double_field(fields[4], line_no, "width");
    double h = detail::parse_double_field(fields[5], line_no, "height");
    if (frame < -1'000'000'000 || frame > 1'000'000'000)
      throw detail::line_error(line_no, "frame index out of range");
    if (!seen.insert({frame, id}).second)
      throw detail::line_error(line_no, "duplicate state for frame " + std::to_string(frame) +
                                            ", id " + std::to_string(id));
    Shape s;
    try {
      s = Shape::make_box(x, y, x + w, y + h);
    } catch (const std::exception& e) {
      throw detail::line_error(line_no, e.what());
    }
    if (fields.size() >= 7) {
      double conf = detail::parse_double_field(fields[6], line_no, "confidence");
      if (conf > 0.0 && conf <= 1.0) s = s.with_score(conf);
    }
    Track& tr = by_label[id];
    tr.label = id;
    tr.states[static_cast<int>(frame)] = std::move(s);
    if (!any || frame < t_min) t_min = static_cast<int>(frame);
    if (!any || frame > t_max) t_max = static_cast<int>(frame);
    any = true;
    out.record_count++;
  }
  out.tracks.t_begin = any ? t_min : 0;
  out.tracks.t_end = any ? t_max : -1;
  for (auto& [label, tr] : by_label) out.tracks.tracks.push_back(std::move(tr));
  return out;
}

// Writes tracks in the same comma-separated layout, sorted by label then
// frame, with 17-significant-digit coordinates so a reload reproduces the
// states exactly. Missing scores are written as the conventional -1.
inline std::string tracks_to_csv(const TrackSet& set) {
  std::vector<const Track*> order;
  for (const auto& tr : set.tracks) order.push_back(&tr);
  std::sort(order.begin(), order.end(),
            [](const Track* a, const Track* b) { return a->label < b->label; });
  std::string out;
  for (const Track* tr : order)
    for (const auto& [t, s] : tr->states) {
      if (s.kind != ShapeKind::Box)
        throw std::runtime_error("only box states can be serialized to track CSV");
      out += std::to_string(t);
      out += ',';
      out += std::to_string(tr->label);
      out += ',';
      out += format_double(s.box.x0);
      out += ',';
      out += format_double(s.box.y0);
      out += ',';
      out += format_double(s.box.width());
      out += ',';
      out += format_double(s.box.height());
      out += ',';
      out += s.score ? format_double(*s.score) : "-1";
      out += '\n';
    }
  return out;
}

inline void save_tracks(const std::string& path, const TrackSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << tracks_to_csv(set);
}

// Grows both windows to their union so two independently loaded files can be
// compared; states are never moved, only the declared bounds widen.
inline void unify_windows(TrackSet& a, TrackSet& b) {
  bool a_empty = a.t_end < a.t_begin;
  bool b_empty = b.t_end < b.t_begin;
  if (a_empty && b_empty) {
    a.t_begin = b.t_begin = 0;
    a.t_end = b.t_end = -1;
    return;
  }
  if (a_empty) {
    a.t_begin = b.t_begin;
    a.t_end = b.t_end;
    return;
  }
  if (b_empty) {
    b.t_begin = a.t_begin;
    b.t_end = a.t_end;
    return;
  }
  int lo = std::min(a.t_begin, b.t_begin);
  int hi = std::max(a.t_end, b.t_end);
  a.t_begin = b.t_begin = lo;
  a.t_end = b.t_end = hi;
}

}  // namespace shapeval
