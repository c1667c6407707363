#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shapeval {

enum class ShapeKind { Box, Mask };

// Axis-aligned rectangle with corners (x0, y0) and (x1, y1), x1 > x0, y1 > y0.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
};

// Occupancy grid over unit cells. Cell (cx, cy) covers the unit square with
// lower corner (x0 + cx, y0 + cy). Row-major storage, height * width entries.
struct MaskGrid {
  std::int64_t x0 = 0;
  std::int64_t y0 = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> cells;

  bool at(std::int64_t cx, std::int64_t cy) const {
    return cells[static_cast<std::size_t>(cy * width + cx)] != 0;
  }
};

// A detected or reference region: a box or a rasterized mask, optionally
// carrying a confidence score in (0, 1] and an integer category label.
struct Shape {
  ShapeKind kind = ShapeKind::Box;
  Box box{};
  MaskGrid mask{};
  std::optional<double> score;
  std::optional<int> category;

  static Shape make_box(double x0, double y0, double x1, double y1) {
    if (!(std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1)))
      throw std::invalid_argument("box corners must be finite");
    if (!(x1 > x0 && y1 > y0))
      throw std::invalid_argument("box must have strictly positive extent");
    Shape s;
    s.kind = ShapeKind::Box;
    s.box = Box{x0, y0, x1, y1};
    return s;
  }

  static Shape make_mask(std::int64_t x0, std::int64_t y0, std::int64_t width,
                         std::int64_t height, std::vector<std::uint8_t> cells) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("mask grid must have positive dimensions");
    if (cells.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw std::invalid_argument("mask cell buffer does not match grid dimensions");
    if (std::all_of(cells.begin(), cells.end(), [](std::uint8_t c) { return c == 0; }))
      throw std::invalid_argument("mask must contain at least one occupied cell");
    Shape s;
    s.kind = ShapeKind::Mask;
    s.mask = MaskGrid{x0, y0, width, height, std::move(cells)};
    return s;
  }

  // Copy-returning builders, usable on const shapes and temporaries alike.
  Shape with_score(double s) const {
    if (!(s > 0.0 && s <= 1.0))
      throw std::invalid_argument("score must lie in (0, 1]");
    Shape out = *this;
    out.score = s;
    return out;
  }

  Shape with_category(int c) const {
    Shape out = *this;
    out.category = c;
    return out;
  }
};

namespace detail {

inline double box_intersection_area(const Box& a, const Box& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  if (w <= 0.0) return 0.0;
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (h <= 0.0) return 0.0;
  return w * h;
}

inline Box box_enclosing(const Box& a, const Box& b) {
  return Box{std::min(a.x0, b.x0), std::min(a.y0, b.y0),
             std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

inline std::int64_t mask_cell_count(const MaskGrid& m) {
  std::int64_t n = 0;
  for (std::uint8_t c : m.cells) n += (c != 0);
  return n;
}

// Intersection and union cell counts of two grids in absolute coordinates.
inline std::pair<std::int64_t, std::int64_t> mask_overlap_counts(const MaskGrid& a,
                                                                 const MaskGrid& b) {
  const std::int64_t ax1 = a.x0 + a.width, ay1 = a.y0 + a.height;
  const std::int64_t bx1 = b.x0 + b.width, by1 = b.y0 + b.height;
  const std::int64_t ox0 = std::max(a.x0, b.x0), oy0 = std::max(a.y0, b.y0);
  const std::int64_t ox1 = std::min(ax1, bx1), oy1 = std::min(ay1, by1);
  std::int64_t inter = 0;
  for (std::int64_t y = oy0; y < oy1; ++y)
    for (std::int64_t x = ox0; x < ox1; ++x)
      if (a.at(x - a.x0, y - a.y0) && b.at(x - b.x0, y - b.y0)) ++inter;
  const std::int64_t uni = mask_cell_count(a) + mask_cell_count(b) - inter;
  return {inter, uni};
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain; returns the hull in counter-clockwise order.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& p, const Point2& q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& p, const Point2& q) {
                          return p.x == q.x && p.y == q.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline void append_cell_corners(const MaskGrid& m, std::vector<Point2>& pts) {
  for (std::int64_t cy = 0; cy < m.height; ++cy)
    for (std::int64_t cx = 0; cx < m.width; ++cx)
      if (m.at(cx, cy)) {
        const double x = static_cast<double>(m.x0 + cx);
        const double y = static_cast<double>(m.y0 + cy);
        pts.push_back({x, y});
        pts.push_back({x + 1.0, y});
        pts.push_back({x, y + 1.0});
        pts.push_back({x + 1.0, y + 1.0});
      }
}

// Cell count of the convex hull of both masks' occupied cells, rasterized by
// cell-center membership. Every occupied cell lies inside the hull, so the
// count is never below the union count.
inline std::int64_t mask_hull_cell_count(const MaskGrid& a, const MaskGrid& b) {
  std::vector<Point2> pts;
  append_cell_corners(a, pts);
  append_cell_corners(b, pts);
  const std::vector<Point2> hull = convex_hull(std::move(pts));
  double min_x = hull[0].x, max_x = hull[0].x, min_y = hull[0].y, max_y = hull[0].y;
  for (const Point2& p : hull) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const auto lo_x = static_cast<std::int64_t>(std::floor(min_x));
  const auto hi_x = static_cast<std::int64_t>(std::ceil(max_x));
  const auto lo_y = static_cast<std::int64_t>(std::floor(min_y));
  const auto hi_y = static_cast<std::int64_t>(std::ceil(max_y));
  const std::size_t nv = hull.size();
  std::int64_t count = 0;
  for (std::int64_t cy = lo_y; cy < hi_y; ++cy) {
    for (std::int64_t cx = lo_x; cx < hi_x; ++cx) {
      const Point2 c{static_cast<double>(cx) + 0.5, static_cast<double>(cy) + 0.5};
      bool inside = true;
      for (std::size_t i = 0; i < nv && inside; ++i) {
        const Point2& p = hull[i];
        const Point2& q = hull[(i + 1) % nv];
        inside = cross(p, q, c) >= 0.0;
      }
      count += inside;
    }
  }
  return count;
}

inline void require_same_kind(const Shape& a, const Shape& b) {
  if (a.kind != b.kind)
    throw std::invalid_argument("cannot compare a box with a mask");
}

// Intersection-over-union and the area of the tightest convex cover, shared
// by the plain and generalized distances.
struct OverlapStats {
  double intersection = 0.0;
  double union_ = 0.0;
  double hull = 0.0;
};

inline OverlapStats overlap_stats(const Shape& a, const Shape& b, bool need_hull) {
  OverlapStats st;
  if (a.kind == ShapeKind::Box) {
    st.intersection = box_intersection_area(a.box, b.box);
    st.union_ = a.box.area() + b.box.area() - st.intersection;
    if (need_hull) st.hull = box_enclosing(a.box, b.box).area();
  } else {
    const auto [inter, uni] = mask_overlap_counts(a.mask, b.mask);
    st.intersection = static_cast<double>(inter);
    st.union_ = static_cast<double>(uni);
    if (need_hull) st.hull = static_cast<double>(mask_hull_cell_count(a.mask, b.mask));
  }
  return st;
}

}  // namespace detail

// Area of a box or occupied-cell count of a mask.
inline double volume(const Shape& s) {
  if (s.kind == ShapeKind::Box) return s.box.area();
  return static_cast<double>(detail::mask_cell_count(s.mask));
}

// One minus intersection-over-union. Range [0, 1]; 0 exactly for identical
// regions, 1 for disjoint ones.
inline double iou_distance(const Shape& a, const Shape& b) {
  detail::require_same_kind(a, b);
  const auto st = detail::overlap_stats(a, b, false);
  return 1.0 - st.intersection / st.union_;
}

// Generalized IoU mapped to a distance: (1 - giou) / 2 with
// giou = iou - |C \ (a u b)| / |C|, C the enclosing box (boxes) or the
// rasterized convex hull (masks). Range [0, 1).
inline double giou_distance(const Shape& a, const Shape& b) {
  detail::require_same_kind(a, b);
  const auto st = detail::overlap_stats(a, b, true);
  const double iou = st.intersection / st.union_;
  const double gap = std::max(st.hull - st.union_, 0.0);
  const double giou = iou - gap / st.hull;
  return 0.5 * (1.0 - giou);
}

namespace detail {

// Score-augmented overlap: each region is extruded along a third axis over
// (0, score], so volumes scale by the score and the intersection by the
// smaller of the two scores.
struct Overlap3Stats {
  double intersection = 0.0;
  double union_ = 0.0;
  double hull = 0.0;
};

inline Overlap3Stats augmented_stats(const Shape& a, const Shape& b, bool need_hull) {
  if (!a.score || !b.score)
    throw std::invalid_argument("augmented distance requires scores on both shapes");
  const auto st = overlap_stats(a, b, need_hull);
  const double sa = *a.score, sb = *b.score;
  Overlap3Stats r;
  const double va = volume(a) * sa;
  const double vb = volume(b) * sb;
  r.intersection = st.intersection * std::min(sa, sb);
  r.union_ = va + vb - r.intersection;
  if (need_hull) r.hull = st.hull * std::max(sa, sb);
  return r;
}

}  // namespace detail

// Extruded-volume IoU distance for score-carrying shapes. Masks fall back to
// the plain IoU distance, scores untouched.
inline double augmented_iou_distance(const Shape& a, const Shape& b) {
  detail::require_same_kind(a, b);
  if (a.kind == ShapeKind::Mask) return iou_distance(a, b);
  const auto st = detail::augmented_stats(a, b, false);
  return 1.0 - st.intersection / st.union_;
}

// Extruded-volume generalized IoU distance for score-carrying shapes. Masks
// fall back to the plain generalized distance.
inline double augmented_giou_distance(const Shape& a, const Shape& b) {
  detail::require_same_kind(a, b);
  if (a.kind == ShapeKind::Mask) return giou_distance(a, b);
  const auto st = detail::augmented_stats(a, b, true);
  const double iou = st.intersection / st.union_;
  const double gap = std::max(st.hull - st.union_, 0.0);
  const double giou = iou - gap / st.hull;
  return 0.5 * (1.0 - giou);
}

enum class BaseDistance { Iou, Giou, AugmentedIou, AugmentedGiou };

inline double base_distance(const Shape& a, const Shape& b, BaseDistance base) {
  switch (base) {
    case BaseDistance::Iou: return iou_distance(a, b);
    case BaseDistance::Giou: return giou_distance(a, b);
    case BaseDistance::AugmentedIou: return augmented_iou_distance(a, b);
    case BaseDistance::AugmentedGiou: return augmented_giou_distance(a, b);
  }
  throw std::invalid_argument("unknown base distance");
}

// Largest base distance accepted at similarity threshold t: a pair counts as
// overlapping iff its similarity index is at least t. IoU-backed distances
// live on [0, 1]; generalized-IoU thresholds live on the [-1, 1] index scale,
// where index i maps to distance (1 - i) / 2.
inline double max_match_distance(BaseDistance base, double threshold) {
  switch (base) {
    case BaseDistance::Iou:
    case BaseDistance::AugmentedIou:
      return 1.0 - threshold;
    case BaseDistance::Giou:
    case BaseDistance::AugmentedGiou:
      return 0.5 * (1.0 - threshold);
  }
  throw std::invalid_argument("unknown base distance");
}

}  // namespace shapeval
