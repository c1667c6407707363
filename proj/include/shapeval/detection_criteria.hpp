#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "shapeval/assignment.hpp"
#include "shapeval/set_metrics.hpp"

namespace shapeval {

enum class AssignMode { Greedy, Optimal };
enum class Interp { AllPoint, Grid };

struct F1Result {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace detail {

inline CostMatrix criterion_costs(const ShapeSet& ref, const ShapeSet& pred,
                                  BaseDistance base) {
  CostMatrix c(ref.size(), pred.size());
  for (std::size_t i = 0; i < ref.size(); ++i)
    for (std::size_t j = 0; j < pred.size(); ++j)
      c.at(i, j) = base_distance(ref.shapes[i], pred.shapes[j], base);
  return c;
}

// Augmented costs for optimal-assignment matching; reference shapes without
// a score count as full confidence.
inline CostMatrix augmented_costs(const ShapeSet& ref, const ShapeSet& pred,
                                  BaseDistance base) {
  const BaseDistance augmented = (base == BaseDistance::Giou || base == BaseDistance::AugmentedGiou)
                                     ? BaseDistance::AugmentedGiou
                                     : BaseDistance::AugmentedIou;
  CostMatrix c(ref.size(), pred.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    Shape r = ref.shapes[i];
    if (!r.score) r.score = 1.0;
    for (std::size_t j = 0; j < pred.size(); ++j)
      c.at(i, j) = base_distance(r, pred.shapes[j], augmented);
  }
  return c;
}

inline void require_scores(const ShapeSet& pred) {
  for (const Shape& s : pred.shapes)
    if (!s.score) throw std::invalid_argument("predictions must carry confidence scores");
}

// Predictions ordered by descending score (ties: lower index), each flagged
// true positive or false positive for one threshold.
struct SweepFlags {
  std::vector<double> scores;
  std::vector<char> tp;
};

inline SweepFlags sweep_flags(const ShapeSet& ref, const ShapeSet& pred, double threshold,
                              BaseDistance base, AssignMode assign) {
  require_scores(pred);
  const double maxd = max_match_distance(base, threshold);
  std::vector<char> matched(pred.size(), 0);
  std::vector<double> scores(pred.size());
  for (std::size_t j = 0; j < pred.size(); ++j) scores[j] = *pred.shapes[j].score;
  if (assign == AssignMode::Greedy) {
    // Each prediction claims its nearest free reference, best score first.
    CostMatrix c(pred.size(), ref.size());
    for (std::size_t j = 0; j < pred.size(); ++j)
      for (std::size_t i = 0; i < ref.size(); ++i)
        c.at(j, i) = base_distance(ref.shapes[i], pred.shapes[j], base);
    const Matching m = greedy_match(c, scores, maxd);
    for (std::size_t j = 0; j < pred.size(); ++j) matched[j] = (m.row_to_col[j] >= 0);
  } else {
    // One optimal assignment on score-augmented distances; matched pairs
    // count only when the plain base distance clears the threshold.
    const CostMatrix plain = criterion_costs(ref, pred, base);
    const Matching m = solve_assignment(augmented_costs(ref, pred, base));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const std::int64_t j = m.row_to_col[i];
      if (j >= 0 && plain.at(i, static_cast<std::size_t>(j)) <= maxd)
        matched[static_cast<std::size_t>(j)] = 1;
    }
  }
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  SweepFlags out;
  out.scores.reserve(pred.size());
  out.tp.reserve(pred.size());
  for (std::size_t j : order) {
    out.scores.push_back(scores[j]);
    out.tp.push_back(matched[j]);
  }
  return out;
}

}  // namespace detail

// Detection F1 at one similarity threshold. Matches come from one optimal
// assignment on the base distances; a matched pair counts as true positive
// iff its distance clears the threshold. Conventions: both sets empty -> 1,
// exactly one empty -> 0.
inline F1Result f1_score(const ShapeSet& ref, const ShapeSet& pred, double threshold,
                         BaseDistance base = BaseDistance::Iou) {
  F1Result r;
  r.fn = static_cast<std::int64_t>(ref.size());
  r.fp = static_cast<std::int64_t>(pred.size());
  if (ref.empty() && pred.empty()) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  if (!ref.empty() && !pred.empty()) {
    const double maxd = max_match_distance(base, threshold);
    const CostMatrix c = detail::criterion_costs(ref, pred, base);
    const Matching m = solve_assignment(c);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const std::int64_t j = m.row_to_col[i];
      if (j >= 0 && c.at(i, static_cast<std::size_t>(j)) <= maxd) ++r.tp;
    }
  }
  r.fp -= r.tp;
  r.fn -= r.tp;
  r.precision = (r.tp + r.fp > 0) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn > 0) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall > 0.0)
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

// Area under the interpolated precision-recall curve at one threshold.
// AllPoint integrates the running-maximum precision over every recall step
// from zero; Grid averages it over grid_points evenly spaced recall values.
// Conventions: both empty -> 1, exactly one empty -> 0.
inline double average_precision(const ShapeSet& ref, const ShapeSet& pred, double threshold,
                                BaseDistance base = BaseDistance::Iou,
                                AssignMode assign = AssignMode::Greedy,
                                Interp interp = Interp::AllPoint, int grid_points = 101) {
  if (ref.empty() && pred.empty()) return 1.0;
  if (ref.empty() || pred.empty()) return 0.0;
  const detail::SweepFlags flags = detail::sweep_flags(ref, pred, threshold, base, assign);
  const auto n = flags.tp.size();
  std::vector<double> prec(n), rec(n);
  std::int64_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += flags.tp[i];
    prec[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    rec[i] = static_cast<double>(tp) / static_cast<double>(ref.size());
  }
  if (interp == Interp::AllPoint) {
    double ap = 0.0, pmax = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      pmax = std::max(pmax, prec[i]);
      const double lo = (i == 0) ? 0.0 : rec[i - 1];
      if (rec[i] > lo) ap += (rec[i] - lo) * pmax;
    }
    return ap;
  }
  if (grid_points < 2) throw std::invalid_argument("recall grid needs at least two points");
  std::vector<double> suffix_max(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix_max[i] = std::max(suffix_max[i + 1], prec[i]);
  double ap = 0.0;
  for (int gidx = 0; gidx < grid_points; ++gidx) {
    const double r = static_cast<double>(gidx) / static_cast<double>(grid_points - 1);
    const auto it = std::lower_bound(rec.begin(), rec.end(), r);
    ap += suffix_max[static_cast<std::size_t>(it - rec.begin())];
  }
  return ap / static_cast<double>(grid_points);
}

// Average precision over classes (and optionally a threshold grid). Every
// shape must carry a category; classes are those present in the reference.
inline double mean_ap(const ShapeSet& ref, const ShapeSet& pred,
                      const std::vector<double>& thresholds,
                      BaseDistance base = BaseDistance::Iou,
                      AssignMode assign = AssignMode::Greedy,
                      Interp interp = Interp::AllPoint, int grid_points = 101) {
  if (thresholds.empty()) throw std::invalid_argument("threshold grid must be non-empty");
  if (ref.empty()) return pred.empty() ? 1.0 : 0.0;
  std::set<int> classes;
  for (const Shape& s : ref.shapes) {
    if (!s.category) throw std::invalid_argument("class-averaged AP requires categories");
    classes.insert(*s.category);
  }
  for (const Shape& s : pred.shapes)
    if (!s.category) throw std::invalid_argument("class-averaged AP requires categories");
  double total = 0.0;
  for (int cls : classes) {
    ShapeSet ref_c, pred_c;
    for (const Shape& s : ref.shapes)
      if (*s.category == cls) ref_c.shapes.push_back(s);
    for (const Shape& s : pred.shapes)
      if (*s.category == cls) pred_c.shapes.push_back(s);
    double over_thresholds = 0.0;
    for (double t : thresholds)
      over_thresholds += average_precision(ref_c, pred_c, t, base, assign, interp, grid_points);
    total += over_thresholds / static_cast<double>(thresholds.size());
  }
  return total / static_cast<double>(classes.size());
}

inline double mean_ap(const ShapeSet& ref, const ShapeSet& pred, double threshold,
                      BaseDistance base = BaseDistance::Iou,
                      AssignMode assign = AssignMode::Greedy,
                      Interp interp = Interp::AllPoint, int grid_points = 101) {
  return mean_ap(ref, pred, std::vector<double>{threshold}, base, assign, interp, grid_points);
}

inline std::vector<double> default_fppi_grid() {
  std::vector<double> grid(9);
  for (int i = 0; i < 9; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -2.0 + 0.25 * i);
  return grid;
}

// Geometric mean of the miss rate sampled at fixed false-positives-per-image
// rates along the confidence sweep. Miss rates are floored at mr_floor so a
// perfect prediction scores the floor; an empty prediction scores 1.
inline double log_average_miss_rate(const ShapeSet& ref, const ShapeSet& pred,
                                    double threshold, BaseDistance base = BaseDistance::Iou,
                                    AssignMode assign = AssignMode::Greedy,
                                    const std::vector<double>& fppi_grid = default_fppi_grid(),
                                    double mr_floor = 1e-4, double images = 1.0) {
  if (fppi_grid.empty()) throw std::invalid_argument("fppi grid must be non-empty");
  if (!(images > 0.0)) throw std::invalid_argument("image count must be positive");
  if (ref.empty()) return pred.empty() ? mr_floor : 1.0;
  std::vector<double> fppi{0.0}, mr{1.0};
  if (!pred.empty()) {
    const detail::SweepFlags flags = detail::sweep_flags(ref, pred, threshold, base, assign);
    std::int64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < flags.tp.size(); ++i) {
      tp += flags.tp[i];
      fp += !flags.tp[i];
      fppi.push_back(static_cast<double>(fp) / images);
      mr.push_back(1.0 - static_cast<double>(tp) / static_cast<double>(ref.size()));
    }
  }
  std::vector<double> sampled;
  sampled.reserve(fppi_grid.size());
  for (double f : fppi_grid) {
    // Miss rate of the latest sweep point not exceeding the reference rate.
    std::size_t pick = 0;
    for (std::size_t i = 0; i < fppi.size(); ++i)
      if (fppi[i] <= f) pick = i;
    sampled.push_back(std::max(mr[pick], mr_floor));
  }
  // The geometric mean of equal values is that value; returning it directly
  // keeps the floor (and a flat miss rate of 1) exact.
  bool all_equal = true;
  for (double v : sampled) all_equal = all_equal && v == sampled.front();
  if (all_equal) return sampled.front();
  double log_sum = 0.0;
  for (double v : sampled) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(sampled.size()));
}

}  // namespace shapeval
