#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shapeval/geometry.hpp"
#include "shapeval/json_out.hpp"
#include "shapeval/set_metrics.hpp"

namespace shapeval {

// Which geometry payload to read from each annotation record.
enum class ShapePayload {
  Box,   // read "bbox" ([x, y, w, h])
  Mask,  // read "segmentation" (polygons or RLE)
};

struct DetectionFile {
  // One shape set per image id; records with no "image_id" land on image 0.
  std::map<std::int64_t, ShapeSet> images;
  std::size_t record_count = 0;
};

namespace detail {

inline std::runtime_error record_error(std::size_t index, const std::string& what) {
  return std::runtime_error("annotation record " + std::to_string(index) + ": " + what);
}

inline double require_number(const nlohmann::json& v, std::size_t index, const char* what) {
  if (!v.is_number()) throw record_error(index, std::string(what) + " must be a number");
  return v.get<double>();
}

// Even-odd ray-cast test for a cell centre against one polygon ring.
inline bool point_in_ring(const std::vector<std::pair<double, double>>& ring, double px,
                          double py) {
  bool inside = false;
  std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    double xi = ring[i].first, yi = ring[i].second;
    double xj = ring[j].first, yj = ring[j].second;
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

// Decode the compact run-length string format used for binary masks:
// each count is a varint of 5-bit groups biased by 48, bit 0x20 continues,
// bit 0x10 of the final group sign-extends, and counts after the second are
// deltas against the count two positions back.
inline std::vector<std::int64_t> decode_rle_string(const std::string& s, std::size_t index) {
  std::vector<std::int64_t> counts;
  std::size_t p = 0;
  while (p < s.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= s.size()) throw record_error(index, "truncated run-length counts string");
      std::int64_t c = static_cast<std::int64_t>(s[p]) - 48;
      if (c < 0 || c > 63) throw record_error(index, "invalid character in run-length counts");
      x |= (c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      p++;
      if (!more && (c & 0x10)) x |= -1LL << (5 * k + 5);
      k++;
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    counts.push_back(x);
  }
  return counts;
}

// Expand column-major run counts (starting with a zero-run) into a row-major
// cell buffer of the given canvas size.
inline std::vector<std::uint8_t> runs_to_cells(const std::vector<std::int64_t>& counts,
                                               std::int64_t h, std::int64_t w,
                                               std::size_t index) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(h * w), 0);
  std::int64_t pos = 0;
  std::uint8_t value = 0;
  for (std::int64_t run : counts) {
    if (run < 0) throw record_error(index, "negative run length in mask counts");
    for (std::int64_t i = 0; i < run; ++i) {
      if (pos >= h * w) throw record_error(index, "mask run lengths exceed the canvas size");
      if (value) {
        std::int64_t row = pos % h;
        std::int64_t col = pos / h;
        cells[static_cast<std::size_t>(row * w + col)] = 1;
      }
      pos++;
    }
    value ^= 1;
  }
  if (pos != h * w) throw record_error(index, "mask run lengths do not cover the canvas");
  return cells;
}

// Trim an origin-anchored cell buffer to the tight bounds of its occupied
// cells so later overlap tests touch as few cells as possible.
inline Shape make_cropped_mask(std::int64_t x0, std::int64_t y0, std::int64_t w, std::int64_t h,
                               const std::vector<std::uint8_t>& cells, std::size_t index) {
  std::int64_t min_x = w, max_x = -1, min_y = h, max_y = -1;
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x)
      if (cells[static_cast<std::size_t>(y * w + x)]) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
  if (max_x < 0) throw record_error(index, "mask has no occupied cells");
  std::int64_t cw = max_x - min_x + 1;
  std::int64_t ch = max_y - min_y + 1;
  std::vector<std::uint8_t> cropped(static_cast<std::size_t>(cw * ch), 0);
  for (std::int64_t y = 0; y < ch; ++y)
    for (std::int64_t x = 0; x < cw; ++x)
      cropped[static_cast<std::size_t>(y * cw + x)] =
          cells[static_cast<std::size_t>((y + min_y) * w + (x + min_x))];
  return Shape::make_mask(x0 + min_x, y0 + min_y, cw, ch, cropped);
}

inline Shape mask_from_polygons(const nlohmann::json& seg, std::size_t index) {
  std::vector<std::vector<std::pair<double, double>>> rings;
  for (const auto& poly : seg) {
    if (!poly.is_array() || poly.size() < 6 || poly.size() % 2 != 0)
      throw record_error(index, "polygon must be a flat [x1,y1,...] list of at least 3 points");
    std::vector<std::pair<double, double>> ring;
    for (std::size_t i = 0; i + 1 < poly.size(); i += 2)
      ring.emplace_back(require_number(poly[i], index, "polygon coordinate"),
                        require_number(poly[i + 1], index, "polygon coordinate"));
    rings.push_back(std::move(ring));
  }
  double lo_x = rings[0][0].first, hi_x = lo_x, lo_y = rings[0][0].second, hi_y = lo_y;
  for (const auto& ring : rings)
    for (const auto& [x, y] : ring) {
      lo_x = std::min(lo_x, x);
      hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
  std::int64_t x0 = static_cast<std::int64_t>(std::floor(lo_x));
  std::int64_t y0 = static_cast<std::int64_t>(std::floor(lo_y));
  std::int64_t x1 = static_cast<std::int64_t>(std::ceil(hi_x));
  std::int64_t y1 = static_cast<std::int64_t>(std::ceil(hi_y));
  std::int64_t w = std::max<std::int64_t>(x1 - x0, 1);
  std::int64_t h = std::max<std::int64_t>(y1 - y0, 1);
  if (w * h > 100'000'000) throw record_error(index, "polygon bounding box is implausibly large");
  // A cell is occupied when its centre lies inside the union of the rings.
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w * h), 0);
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) {
      double px = static_cast<double>(x0 + x) + 0.5;
      double py = static_cast<double>(y0 + y) + 0.5;
      for (const auto& ring : rings)
        if (point_in_ring(ring, px, py)) {
          cells[static_cast<std::size_t>(y * w + x)] = 1;
          break;
        }
    }
  return make_cropped_mask(x0, y0, w, h, cells, index);
}

inline Shape mask_from_rle(const nlohmann::json& seg, std::size_t index) {
  if (!seg.contains("size") || !seg["size"].is_array() || seg["size"].size() != 2)
    throw record_error(index, "run-length mask needs a [height, width] size");
  std::int64_t h = seg["size"][0].get<std::int64_t>();
  std::int64_t w = seg["size"][1].get<std::int64_t>();
  if (h <= 0 || w <= 0) throw record_error(index, "mask size must be positive");
  if (h * w > 100'000'000) throw record_error(index, "mask canvas is implausibly large");
  if (!seg.contains("counts")) throw record_error(index, "run-length mask needs counts");
  std::vector<std::int64_t> counts;
  if (seg["counts"].is_array()) {
    for (const auto& c : seg["counts"])
      counts.push_back(static_cast<std::int64_t>(require_number(c, index, "run count")));
  } else if (seg["counts"].is_string()) {
    counts = decode_rle_string(seg["counts"].get<std::string>(), index);
  } else {
    throw record_error(index, "run-length counts must be an array or a string");
  }
  auto cells = runs_to_cells(counts, h, w, index);
  return make_cropped_mask(0, 0, w, h, cells, index);
}

inline Shape shape_from_record(const nlohmann::json& rec, std::size_t index,
                               ShapePayload payload) {
  Shape shape;
  if (payload == ShapePayload::Box) {
    if (!rec.contains("bbox")) throw record_error(index, "missing bbox");
    const auto& bb = rec["bbox"];
    if (!bb.is_array() || bb.size() != 4)
      throw record_error(index, "bbox must be [x, y, width, height]");
    double x = require_number(bb[0], index, "bbox entry");
    double y = require_number(bb[1], index, "bbox entry");
    double w = require_number(bb[2], index, "bbox entry");
    double h = require_number(bb[3], index, "bbox entry");
    try {
      shape = Shape::make_box(x, y, x + w, y + h);
    } catch (const std::exception& e) {
      throw record_error(index, e.what());
    }
  } else {
    if (!rec.contains("segmentation")) throw record_error(index, "missing segmentation");
    const auto& seg = rec["segmentation"];
    try {
      if (seg.is_array()) {
        if (seg.empty()) throw record_error(index, "segmentation is empty");
        shape = mask_from_polygons(seg, index);
      } else if (seg.is_object()) {
        shape = mask_from_rle(seg, index);
      } else {
        throw record_error(index, "segmentation must be polygons or a run-length object");
      }
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      throw record_error(index, e.what());
    }
  }
  if (rec.contains("score")) {
    double s = require_number(rec["score"], index, "score");
    try {
      shape = shape.with_score(s);
    } catch (const std::exception& e) {
      throw record_error(index, e.what());
    }
  }
  if (rec.contains("category_id")) {
    if (!rec["category_id"].is_number_integer())
      throw record_error(index, "category_id must be an integer");
    shape = shape.with_category(rec["category_id"].get<int>());
  }
  return shape;
}

}  // namespace detail

// Reads a detection file: either a bare JSON array of annotation records or
// an object carrying an "annotations" array. Every record must yield a valid
// shape; malformed records abort the load with their index in the message.
inline DetectionFile load_detections(const std::string& path, ShapePayload payload) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  const nlohmann::json* records = nullptr;
  if (doc.is_array()) {
    records = &doc;
  } else if (doc.is_object() && doc.contains("annotations") && doc["annotations"].is_array()) {
    records = &doc["annotations"];
  } else {
    throw std::runtime_error(path +
                             ": expected an array of annotations or an object with an "
                             "\"annotations\" array");
  }
  DetectionFile out;
  for (std::size_t i = 0; i < records->size(); ++i) {
    const auto& rec = (*records)[i];
    if (!rec.is_object()) throw detail::record_error(i, "record must be a JSON object");
    std::int64_t image = 0;
    if (rec.contains("image_id")) {
      if (!rec["image_id"].is_number_integer())
        throw detail::record_error(i, "image_id must be an integer");
      image = rec["image_id"].get<std::int64_t>();
    }
    out.images[image].shapes.push_back(detail::shape_from_record(rec, i, payload));
    out.record_count++;
  }
  for (auto& [image, set] : out.images) set.id = image;
  return out;
}

namespace detail {

// Encode an origin-anchored mask as column-major run counts on the canvas
// [0, x0 + width) x [0, y0 + height); the origin survives as leading zeros.
inline void write_mask_record(JsonWriter& w, const MaskGrid& m) {
  if (m.x0 < 0 || m.y0 < 0)
    throw std::runtime_error("cannot serialize a mask with a negative origin");
  std::int64_t canvas_w = m.x0 + m.width;
  std::int64_t canvas_h = m.y0 + m.height;
  std::vector<std::int64_t> counts;
  std::uint8_t run_value = 0;
  std::int64_t run = 0;
  for (std::int64_t col = 0; col < canvas_w; ++col)
    for (std::int64_t row = 0; row < canvas_h; ++row) {
      bool inside = col >= m.x0 && col < m.x0 + m.width && row >= m.y0 && row < m.y0 + m.height;
      std::uint8_t v = inside && m.at(col - m.x0, row - m.y0) ? 1 : 0;
      if (v == run_value) {
        run++;
      } else {
        counts.push_back(run);
        run_value = v;
        run = 1;
      }
    }
  counts.push_back(run);
  w.key("segmentation");
  w.begin_object();
  w.key("size");
  w.begin_array();
  w.value(canvas_h);
  w.value(canvas_w);
  w.end_array();
  w.key("counts");
  w.begin_array();
  for (std::int64_t c : counts) w.value(c);
  w.end_array();
  w.end_object();
}

inline void write_detection_record(JsonWriter& w, const Shape& s, std::int64_t image_id) {
  w.begin_object();
  w.kv("image_id", image_id);
  if (s.kind == ShapeKind::Box) {
    w.key("bbox");
    w.begin_array();
    w.value(s.box.x0);
    w.value(s.box.y0);
    w.value(s.box.width());
    w.value(s.box.height());
    w.end_array();
  } else {
    write_mask_record(w, s.mask);
  }
  if (s.score) w.kv("score", *s.score);
  if (s.category) w.kv("category_id", *s.category);
  w.end_object();
}

}  // namespace detail

// Serializes shape sets as a JSON array of annotation records, one image per
// set, in a stable order; loading the result reproduces the shapes exactly.
inline std::string detections_to_json(const std::vector<std::pair<std::int64_t, ShapeSet>>& images) {
  JsonWriter w;
  w.begin_array();
  for (const auto& [image_id, set] : images)
    for (const auto& s : set.shapes) detail::write_detection_record(w, s, image_id);
  w.end_array();
  return w.str();
}

inline std::string detections_to_json(const ShapeSet& set, std::int64_t image_id = 0) {
  return detections_to_json({{image_id, set}});
}

inline void save_detections(const std::string& path,
                            const std::vector<std::pair<std::int64_t, ShapeSet>>& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << detections_to_json(images) << "\n";
}

inline void save_detections(const std::string& path, const ShapeSet& set,
                            std::int64_t image_id = 0) {
  save_detections(path, {{image_id, set}});
}

}  // namespace shapeval
