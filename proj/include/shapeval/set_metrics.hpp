#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shapeval/assignment.hpp"
#include "shapeval/geometry.hpp"

namespace shapeval {

// Ordered collection of shapes of one kind, e.g. all detections of one image.
struct ShapeSet {
  std::int64_t id = 0;
  std::vector<Shape> shapes;

  ShapeSet() = default;
  explicit ShapeSet(std::vector<Shape> s, std::int64_t frame = 0)
      : id(frame), shapes(std::move(s)) {
    validate();
  }

  void validate() const {
    for (std::size_t i = 1; i < shapes.size(); ++i)
      if (shapes[i].kind != shapes[0].kind)
        throw std::invalid_argument("all shapes of a set must share one kind");
  }

  bool empty() const { return shapes.empty(); }
  std::size_t size() const { return shapes.size(); }
};

// Parameters shared by the set distances: the pairwise base distance, the
// order p >= 1 and the cut-off c in (0, 1]. The cut-off saturates every base
// distance at c and prices each unassigned object at c, so c is also the
// value reported when exactly one of the sets is empty.
struct MetricConfig {
  BaseDistance base = BaseDistance::Iou;
  double order = 1.0;
  double cutoff = 1.0;
};

namespace detail {

inline void require_config(const MetricConfig& cfg) {
  if (!(cfg.order >= 1.0) || !std::isfinite(cfg.order))
    throw std::invalid_argument("metric order must be >= 1");
  if (!(cfg.cutoff > 0.0 && cfg.cutoff <= 1.0))
    throw std::invalid_argument("metric cut-off must lie in (0, 1]");
}

inline double cut_distance(const Shape& a, const Shape& b, const MetricConfig& cfg) {
  return std::min(cfg.cutoff, base_distance(a, b, cfg.base));
}

inline CostMatrix pairwise_costs(const ShapeSet& x, const ShapeSet& y,
                                 const MetricConfig& cfg, double power) {
  CostMatrix c(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      c.at(i, j) = std::pow(cut_distance(x.shapes[i], y.shapes[j], cfg), power);
  return c;
}

}  // namespace detail

// Largest distance from any member of one set to its nearest neighbour in
// the other, symmetrized. Empty conventions: both empty -> 0, exactly one
// empty -> cut-off.
inline double hausdorff(const ShapeSet& x, const ShapeSet& y, const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) return cfg.cutoff;
  const CostMatrix c = detail::pairwise_costs(x, y, cfg, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double nearest = cfg.cutoff;
    for (std::size_t j = 0; j < y.size(); ++j) nearest = std::min(nearest, c.at(i, j));
    worst = std::max(worst, nearest);
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    double nearest = cfg.cutoff;
    for (std::size_t i = 0; i < x.size(); ++i) nearest = std::min(nearest, c.at(i, j));
    worst = std::max(worst, nearest);
  }
  return worst;
}

// Order-p optimal transport distance between the uniform distributions over
// the two sets. Empty conventions as for hausdorff.
inline double emd(const ShapeSet& x, const ShapeSet& y, const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) return cfg.cutoff;
  const CostMatrix c = detail::pairwise_costs(x, y, cfg, cfg.order);
  const TransportPlan plan = solve_transport(c);
  return std::pow(plan.total_cost, 1.0 / cfg.order);
}

namespace detail {

// Shared core of the normalized and un-normalized per-object distances:
// optimal assignment cost plus the cardinality penalty c^p per extra object.
inline double ospa_power_sum(const ShapeSet& x, const ShapeSet& y, const MetricConfig& cfg) {
  const ShapeSet& small = (x.size() <= y.size()) ? x : y;
  const ShapeSet& large = (x.size() <= y.size()) ? y : x;
  const CostMatrix c = pairwise_costs(small, large, cfg, cfg.order);
  const Matching m = solve_assignment(c);
  const double penalty = std::pow(cfg.cutoff, cfg.order) *
                         static_cast<double>(large.size() - small.size());
  return m.total_cost + penalty;
}

}  // namespace detail

// Per-object assignment distance: optimal matching cost plus c^p for each
// unassigned object, normalized by the larger cardinality and taken to the
// power 1/p. Both empty -> 0, exactly one empty -> cut-off.
inline double ospa(const ShapeSet& x, const ShapeSet& y, const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) return cfg.cutoff;
  const double sum = detail::ospa_power_sum(x, y, cfg);
  const double n = static_cast<double>(std::max(x.size(), y.size()));
  return std::pow(sum / n, 1.0 / cfg.order);
}

// Same construction without the cardinality normalization, so the value
// grows with the number of objects. Exactly one empty set of n objects
// yields n^(1/p) * c.
inline double ospa_unnormalized(const ShapeSet& x, const ShapeSet& y,
                                const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) {
    const double n = static_cast<double>(std::max(x.size(), y.size()));
    return std::pow(n * std::pow(cfg.cutoff, cfg.order), 1.0 / cfg.order);
  }
  return std::pow(detail::ospa_power_sum(x, y, cfg), 1.0 / cfg.order);
}

}  // namespace shapeval
