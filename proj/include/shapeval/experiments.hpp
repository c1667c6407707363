#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shapeval/detection_criteria.hpp"
#include "shapeval/geometry.hpp"
#include "shapeval/random.hpp"
#include "shapeval/ranking.hpp"
#include "shapeval/sanity.hpp"
#include "shapeval/set_metrics.hpp"
#include "shapeval/track_metrics.hpp"
#include "shapeval/tracking_criteria.hpp"

namespace shapeval {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

namespace detail {

struct StatAcc {
  double sum = 0.0;
  double sumsq = 0.0;
  std::int64_t n = 0;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  Stats stats() const {
    if (n == 0) return {};
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(sumsq / static_cast<double>(n) - mean * mean, 0.0);
    return {mean, std::sqrt(var)};
  }
};

}  // namespace detail

// Criterion catalog. Thresholded criteria take one value per grid point
// (similarity threshold for the classics, matching cut-off for the saturated
// set metrics); the rest produce a single parameter-free value. The
// higher_better flag says which direction ranks first.
struct CriterionInfo {
  bool thresholded = false;
  bool higher_better = false;
  bool needs_classes = false;
};

inline const std::vector<std::pair<std::string, CriterionInfo>>& detection_criterion_catalog() {
  static const std::vector<std::pair<std::string, CriterionInfo>> catalog = {
      {"f1", {true, true, false}},
      {"map", {true, true, true}},
      {"map-greedy", {true, true, true}},
      {"log-amr", {true, false, true}},
      {"hausdorff", {false, false, false}},
      {"emd", {false, false, false}},
      {"ospa", {false, false, false}},
      {"ospa-cut", {true, false, false}},
  };
  return catalog;
}

inline const std::vector<std::pair<std::string, CriterionInfo>>& tracking_criterion_catalog() {
  static const std::vector<std::pair<std::string, CriterionInfo>> catalog = {
      {"mota", {true, true, false}},
      {"idf1", {true, true, false}},
      {"hota", {true, true, false}},
      {"hausdorff", {false, false, false}},
      {"emd", {false, false, false}},
      {"ospa2", {false, false, false}},
      {"ospa2-cut", {true, false, false}},
  };
  return catalog;
}

inline CriterionInfo criterion_info(
    const std::vector<std::pair<std::string, CriterionInfo>>& catalog, const std::string& name) {
  for (const auto& [key, info] : catalog)
    if (key == name) return info;
  std::string known;
  for (const auto& [key, info] : catalog) {
    (void)info;
    known += known.empty() ? key : ", " + key;
  }
  throw std::invalid_argument("unknown criterion '" + name + "' (expected one of: " + known + ")");
}

// Default similarity-threshold grids: the full base-measure range in steps
// of 0.05, both extremes excluded.
inline std::vector<double> default_threshold_grid(BaseDistance base) {
  const bool giou = base == BaseDistance::Giou || base == BaseDistance::AugmentedGiou;
  std::vector<double> grid;
  const int lo = giou ? -19 : 1;
  for (int i = lo; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

namespace detail {

// ----- reductions over a prepared cut-distance cost matrix (order 1) -----

inline double hausdorff_of_costs(const CostMatrix& c, double cutoff) {
  if (c.rows == 0 && c.cols == 0) return 0.0;
  if (c.rows == 0 || c.cols == 0) return cutoff;
  double worst = 0.0;
  for (std::size_t i = 0; i < c.rows; ++i) {
    double best = cutoff;
    for (std::size_t j = 0; j < c.cols; ++j) best = std::min(best, c.at(i, j));
    worst = std::max(worst, best);
  }
  for (std::size_t j = 0; j < c.cols; ++j) {
    double best = cutoff;
    for (std::size_t i = 0; i < c.rows; ++i) best = std::min(best, c.at(i, j));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double emd_of_costs(const CostMatrix& c, double cutoff) {
  if (c.rows == 0 && c.cols == 0) return 0.0;
  if (c.rows == 0 || c.cols == 0) return cutoff;
  return solve_transport(c).total_cost;
}

inline double ospa_of_costs(const CostMatrix& c, double cutoff) {
  if (c.rows == 0 && c.cols == 0) return 0.0;
  if (c.rows == 0 || c.cols == 0) return cutoff;
  const bool transpose = c.rows > c.cols;
  CostMatrix small = c;
  if (transpose) {
    small = CostMatrix(c.cols, c.rows);
    for (std::size_t i = 0; i < c.rows; ++i)
      for (std::size_t j = 0; j < c.cols; ++j) small.at(j, i) = c.at(i, j);
  }
  const Matching m = solve_assignment(small);
  const auto n_large = static_cast<double>(std::max(c.rows, c.cols));
  const auto n_small = static_cast<double>(std::min(c.rows, c.cols));
  return (m.total_cost + cutoff * (n_large - n_small)) / n_large;
}

inline CostMatrix saturate_costs(const CostMatrix& c, double cutoff) {
  CostMatrix out = c;
  for (double& v : out.cost) v = std::min(v, cutoff);
  return out;
}

// Time-averaged track distances saturated at the cut-off, assembled from a
// per-frame context instead of re-walking the track domains per pair.
inline CostMatrix track_cut_costs(const TrackPairContext& ctx, double cutoff) {
  CostMatrix sums(ctx.n_gt, ctx.n_pr, 0.0);
  std::vector<std::int64_t> shared(ctx.n_gt * ctx.n_pr, 0);
  for (std::size_t f = 0; f < ctx.times.size(); ++f) {
    const auto& g = ctx.gt_at[f];
    const auto& p = ctx.pr_at[f];
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b) {
        sums.at(g[a], p[b]) += std::min(cutoff, ctx.dist[f].at(a, b));
        ++shared[g[a] * ctx.n_pr + p[b]];
      }
  }
  CostMatrix out(ctx.n_gt, ctx.n_pr, 0.0);
  for (std::size_t i = 0; i < ctx.n_gt; ++i)
    for (std::size_t j = 0; j < ctx.n_pr; ++j) {
      const std::int64_t both = shared[i * ctx.n_pr + j];
      const std::int64_t united = ctx.gt_count[i] + ctx.pr_count[j] - both;
      const double lone = static_cast<double>(united - both);
      out.at(i, j) =
          united > 0 ? (sums.at(i, j) + cutoff * lone) / static_cast<double>(united) : 0.0;
    }
  return out;
}

// F1 over a threshold sweep: the optimal pairing on raw base distances does
// not depend on the threshold, so solve it once and re-count the accepted
// pairs per grid point.
inline std::vector<double> f1_sweep_of_costs(const CostMatrix& c,
                                             const std::vector<double>& grid,
                                             BaseDistance base) {
  std::vector<double> out(grid.size(), 0.0);
  if (c.rows == 0 && c.cols == 0) {
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  if (c.rows == 0 || c.cols == 0) return out;
  const bool transpose = c.rows > c.cols;
  CostMatrix small = c;
  if (transpose) {
    small = CostMatrix(c.cols, c.rows);
    for (std::size_t i = 0; i < c.rows; ++i)
      for (std::size_t j = 0; j < c.cols; ++j) small.at(j, i) = c.at(i, j);
  }
  const Matching match = solve_assignment(small);
  std::vector<double> matched;
  for (std::size_t r = 0; r < small.rows; ++r)
    if (match.row_to_col[r] >= 0)
      matched.push_back(small.at(r, static_cast<std::size_t>(match.row_to_col[r])));
  const auto n_ref = static_cast<double>(c.rows);
  const auto n_pred = static_cast<double>(c.cols);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double maxd = max_match_distance(base, grid[j]);
    double tp = 0.0;
    for (double d : matched) tp += (d <= maxd) ? 1.0 : 0.0;
    const double precision = tp / n_pred;
    const double recall = tp / n_ref;
    out[j] = (precision + recall > 0.0)
                 ? 2.0 * precision * recall / (precision + recall)
                 : 0.0;
  }
  return out;
}

inline std::vector<int> classes_of(const ShapeSet& ref) {
  std::set<int> classes;
  for (const Shape& s : ref.shapes) {
    if (!s.category)
      throw std::invalid_argument("class-averaged evaluation requires categories on every shape");
    classes.insert(*s.category);
  }
  return {classes.begin(), classes.end()};
}

inline ShapeSet class_subset(const ShapeSet& set, int cls) {
  ShapeSet out;
  out.id = set.id;
  for (const Shape& s : set.shapes)
    if (s.category && *s.category == cls) out.shapes.push_back(s);
  return out;
}

template <typename Metric>
double class_averaged(const ShapeSet& ref, const ShapeSet& pred, Metric&& metric) {
  const std::vector<int> classes = classes_of(ref);
  if (classes.empty()) return metric(ref, pred);
  for (const Shape& s : pred.shapes)
    if (!s.category)
      throw std::invalid_argument("class-averaged evaluation requires categories on every shape");
  double total = 0.0;
  for (int cls : classes) total += metric(class_subset(ref, cls), class_subset(pred, cls));
  return total / static_cast<double>(classes.size());
}

// All requested detection criteria for one (reference, prediction) pair.
// Criteria that reduce to operations on the raw pairwise distance matrix
// share one matrix per (class) pair; the score-driven criteria go through
// their full machinery per grid point.
inline std::vector<std::vector<double>> detection_scores(
    const ShapeSet& ref, const ShapeSet& pred, const std::vector<std::string>& names,
    const std::vector<CriterionInfo>& infos, const std::vector<double>& grid, BaseDistance base,
    bool multi_class) {
  const MetricConfig plain{base, 1.0, 1.0};
  // (reference, prediction) pairs to evaluate: the whole sets, or one pair
  // per reference class in multi-class mode.
  std::vector<std::pair<ShapeSet, ShapeSet>> slices;
  if (multi_class) {
    for (int cls : classes_of(ref)) slices.emplace_back(class_subset(ref, cls), class_subset(pred, cls));
    for (const Shape& s : pred.shapes)
      if (!s.category)
        throw std::invalid_argument("class-averaged evaluation requires categories on every shape");
  }
  if (slices.empty()) slices.emplace_back(ref, pred);
  const auto n_slices = static_cast<double>(slices.size());

  std::vector<std::vector<double>> scores(names.size());
  for (std::size_t c = 0; c < names.size(); ++c)
    scores[c].assign(infos[c].thresholded ? grid.size() : 1, 0.0);

  for (const auto& [ref_s, pred_s] : slices) {
    const CostMatrix costs = pairwise_costs(ref_s, pred_s, plain, 1.0);
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::string& name = names[c];
      if (name == "f1") {
        const std::vector<double> sweep = f1_sweep_of_costs(costs, grid, base);
        for (std::size_t j = 0; j < grid.size(); ++j) scores[c][j] += sweep[j] / n_slices;
      } else if (name == "ospa-cut") {
        for (std::size_t j = 0; j < grid.size(); ++j) {
          const double cut = max_match_distance(base, grid[j]);
          scores[c][j] += ospa_of_costs(saturate_costs(costs, cut), cut) / n_slices;
        }
      } else if (name == "hausdorff") {
        scores[c][0] += hausdorff_of_costs(costs, 1.0) / n_slices;
      } else if (name == "emd") {
        scores[c][0] += emd_of_costs(costs, 1.0) / n_slices;
      } else if (name == "ospa") {
        scores[c][0] += ospa_of_costs(costs, 1.0) / n_slices;
      } else if (name == "map" || name == "map-greedy") {
        const AssignMode mode = name == "map" ? AssignMode::Optimal : AssignMode::Greedy;
        for (std::size_t j = 0; j < grid.size(); ++j)
          scores[c][j] +=
              average_precision(ref_s, pred_s, grid[j], base, mode) / n_slices;
      } else if (name == "log-amr") {
        for (std::size_t j = 0; j < grid.size(); ++j)
          scores[c][j] += log_average_miss_rate(ref_s, pred_s, grid[j], base) / n_slices;
      } else {
        throw std::invalid_argument("unknown detection criterion '" + name + "'");
      }
    }
  }
  return scores;
}

// All requested tracking criteria for one (reference, prediction) pair,
// sharing a single per-frame context across criteria and grid points.
inline std::vector<std::vector<double>> tracking_scores(
    const TrackSet& ref, const TrackSet& pred, const std::vector<std::string>& names,
    const std::vector<CriterionInfo>& infos, const std::vector<double>& grid, BaseDistance base) {
  std::vector<std::vector<double>> scores(names.size());
  for (std::size_t c = 0; c < names.size(); ++c)
    scores[c].assign(infos[c].thresholded ? grid.size() : 1, 0.0);
  const TrackPairContext ctx = make_track_context(ref, pred, base);
  const CostMatrix plain_costs = track_cut_costs(ctx, 1.0);
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::string& name = names[c];
    if (name == "mota")
      for (std::size_t j = 0; j < grid.size(); ++j)
        scores[c][j] = mota_impl(ctx, max_match_distance(base, grid[j])).mota;
    else if (name == "idf1")
      for (std::size_t j = 0; j < grid.size(); ++j)
        scores[c][j] = idf1_impl(ctx, max_match_distance(base, grid[j]));
    else if (name == "hota")
      for (std::size_t j = 0; j < grid.size(); ++j)
        scores[c][j] = hota_impl(ctx, max_match_distance(base, grid[j]));
    else if (name == "hausdorff")
      scores[c][0] = hausdorff_of_costs(plain_costs, 1.0);
    else if (name == "emd")
      scores[c][0] = emd_of_costs(plain_costs, 1.0);
    else if (name == "ospa2")
      scores[c][0] = ospa_of_costs(plain_costs, 1.0);
    else if (name == "ospa2-cut")
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double cut = max_match_distance(base, grid[j]);
        scores[c][j] = ospa_of_costs(track_cut_costs(ctx, cut), cut);
      }
    else
      throw std::invalid_argument("unknown tracking criterion '" + name + "'");
  }
  return scores;
}

}  // namespace detail

// Point evaluation of one detection criterion. `threshold` is ignored by the
// parameter-free metrics. In multi-class mode the criteria without built-in
// class handling are averaged over per-class subsets.
inline double detection_criterion_value(const ShapeSet& ref, const ShapeSet& pred,
                                        const std::string& name, double threshold,
                                        BaseDistance base, bool multi_class) {
  const MetricConfig plain{base, 1.0, 1.0};
  const auto averaged = [&](auto&& fn) {
    return multi_class ? detail::class_averaged(ref, pred, fn) : fn(ref, pred);
  };
  if (name == "f1")
    return averaged(
        [&](const ShapeSet& r, const ShapeSet& p) { return f1_score(r, p, threshold, base).f1; });
  if (name == "map") return mean_ap(ref, pred, threshold, base, AssignMode::Optimal);
  if (name == "map-greedy") return mean_ap(ref, pred, threshold, base, AssignMode::Greedy);
  if (name == "log-amr")
    return averaged([&](const ShapeSet& r, const ShapeSet& p) {
      return log_average_miss_rate(r, p, threshold, base);
    });
  if (name == "hausdorff")
    return averaged(
        [&](const ShapeSet& r, const ShapeSet& p) { return hausdorff(r, p, plain); });
  if (name == "emd")
    return averaged([&](const ShapeSet& r, const ShapeSet& p) { return emd(r, p, plain); });
  if (name == "ospa")
    return averaged([&](const ShapeSet& r, const ShapeSet& p) { return ospa(r, p, plain); });
  if (name == "ospa-cut") {
    const MetricConfig cut{base, 1.0, max_match_distance(base, threshold)};
    return averaged([&](const ShapeSet& r, const ShapeSet& p) { return ospa(r, p, cut); });
  }
  throw std::invalid_argument("unknown detection criterion '" + name + "'");
}

// Point evaluation of one tracking criterion.
inline double tracking_criterion_value(const TrackSet& ref, const TrackSet& pred,
                                       const std::string& name, double threshold,
                                       BaseDistance base) {
  const MetricConfig plain{base, 1.0, 1.0};
  if (name == "mota") return mota(ref, pred, threshold, base).mota;
  if (name == "idf1") return idf1(ref, pred, threshold, base);
  if (name == "hota") return hota(ref, pred, threshold, base);
  if (name == "hausdorff") return hausdorff_tracks(ref, pred, plain);
  if (name == "emd") return emd_tracks(ref, pred, plain);
  if (name == "ospa2") return ospa2(ref, pred, plain);
  if (name == "ospa2-cut") {
    const MetricConfig cut{base, 1.0, max_match_distance(base, threshold)};
    return ospa2(ref, pred, cut);
  }
  throw std::invalid_argument("unknown tracking criterion '" + name + "'");
}

// Per-criterion summary of a Monte Carlo sanity run: the normalized
// Kendall-tau error against the pre-determined ranking (mean and spread over
// trials), derived averaged-score columns, and rank-stability indicators
// across the grid.
struct SanityCriterionSummary {
  std::string name;
  bool thresholded = false;
  bool higher_better = false;
  std::vector<Stats> error;  // one entry per grid point, or a single entry
  bool has_m_partial = false;
  Stats m_partial;  // error of ranking by the score averaged over grid ∩ [0.5, 1)
  Stats m_full;     // ... averaged over the whole grid
  double best_threshold = 0.0;
  Stats best;
  Stats rank_switches, rank_distortion, rank_sensitivity;
};

struct SanityOutcome {
  std::vector<double> thresholds;
  int trials = 0;
  std::size_t algorithms = 0;
  std::vector<SanityCriterionSummary> criteria;
};

namespace detail {

struct SanityAcc {
  std::vector<StatAcc> error;
  StatAcc m_partial, m_full, switches, distortion, sensitivity;
};

inline bool evenly_spaced(const std::vector<double>& grid) {
  if (grid.size() < 3) return true;
  const double step = grid[1] - grid[0];
  for (std::size_t i = 2; i < grid.size(); ++i)
    if (std::abs(grid[i] - grid[i - 1] - step) > 1e-9) return false;
  return true;
}

inline void require_increasing(const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("threshold grid must be strictly increasing");
}

// Shared per-trial aggregation: rank the score vectors, compare against the
// identity ranking, and fold the averaged-score columns plus the stability
// indicators of thresholded criteria.
inline void fold_sanity_trial(const CriterionInfo& info, const std::vector<double>& grid,
                              const std::vector<std::vector<double>>& scores,
                              const std::vector<int>& true_ranks, bool even_grid,
                              SanityAcc& acc) {
  const std::size_t k_total = scores.size();
  const std::size_t cols = info.thresholded ? grid.size() : 1;
  std::vector<double> column(k_total);
  if (info.thresholded) {
    RankMatrix rm;
    rm.algorithms = k_total;
    rm.parameters = grid;
    rm.ranks.resize(k_total * grid.size());
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t k = 0; k < k_total; ++k) column[k] = scores[k][j];
      const std::vector<int> ranks = ranks_from_scores(column, info.higher_better);
      for (std::size_t k = 0; k < k_total; ++k) rm.at(k, j) = ranks[k];
      acc.error[j].add(kendall_tau_normalized(ranks, true_ranks));
    }
    acc.switches.add(avg_rank_switches(rm));
    acc.distortion.add(avg_rank_distortion(rm));
    if (grid.size() >= 2) acc.sensitivity.add(avg_rank_sensitivity(rm, even_grid));
    // Averaged-score columns.
    std::vector<std::size_t> partial;
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (grid[j] >= 0.5 - 1e-12) partial.push_back(j);
    const auto averaged_error = [&](const std::vector<std::size_t>& subset) {
      for (std::size_t k = 0; k < k_total; ++k) {
        double sum = 0.0;
        for (std::size_t j : subset) sum += scores[k][j];
        column[k] = sum / static_cast<double>(subset.size());
      }
      return kendall_tau_normalized(ranks_from_scores(column, info.higher_better), true_ranks);
    };
    if (!partial.empty()) acc.m_partial.add(averaged_error(partial));
    std::vector<std::size_t> all(grid.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    acc.m_full.add(averaged_error(all));
  } else {
    for (std::size_t k = 0; k < k_total; ++k) column[k] = scores[k][0];
    acc.error[0].add(
        kendall_tau_normalized(ranks_from_scores(column, info.higher_better), true_ranks));
  }
}

inline SanityCriterionSummary summarize_sanity(const std::string& name, const CriterionInfo& info,
                                               const std::vector<double>& grid,
                                               const SanityAcc& acc) {
  SanityCriterionSummary s;
  s.name = name;
  s.thresholded = info.thresholded;
  s.higher_better = info.higher_better;
  for (const StatAcc& a : acc.error) s.error.push_back(a.stats());
  if (info.thresholded) {
    s.has_m_partial = acc.m_partial.n > 0;
    if (s.has_m_partial) s.m_partial = acc.m_partial.stats();
    s.m_full = acc.m_full.stats();
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.error.size(); ++j)
      if (s.error[j].mean < s.error[best].mean) best = j;
    s.best_threshold = grid[best];
    s.best = s.error[best];
    s.rank_switches = acc.switches.stats();
    s.rank_distortion = acc.distortion.stats();
    s.rank_sensitivity = acc.sensitivity.stats();
  } else {
    s.best = s.error[0];
  }
  return s;
}

}  // namespace detail

// Monte Carlo sanity run for detection: per trial, generate a scenario with
// known ranking, score every criterion over the grid, and accumulate the
// ranking errors. Trials derive independent seeds, so results do not depend
// on the criterion selection.
inline SanityOutcome run_detection_sanity(const DetectionSanityConfig& cfg,
                                          const std::vector<std::string>& names,
                                          const std::vector<double>& grid, BaseDistance base) {
  detail::require_increasing(grid);
  if (cfg.trials < 1) throw std::invalid_argument("trial count must be positive");
  if (grid.empty()) throw std::invalid_argument("threshold grid must be non-empty");
  std::vector<CriterionInfo> infos;
  for (const std::string& name : names) {
    const CriterionInfo info = criterion_info(detection_criterion_catalog(), name);
    if (info.needs_classes && !cfg.multi_class)
      throw std::invalid_argument("criterion '" + name + "' requires the multi-class scenario");
    infos.push_back(info);
  }
  const bool even_grid = detail::evenly_spaced(grid);
  std::vector<detail::SanityAcc> accs(names.size());
  for (std::size_t c = 0; c < names.size(); ++c)
    accs[c].error.resize(infos[c].thresholded ? grid.size() : 1);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const DetectionScenario sc = gen_detection_scenario(cfg, rng);
    const std::size_t k_total = sc.predictions.size();
    // per_pred[k][criterion][grid column]
    std::vector<std::vector<std::vector<double>>> per_pred(k_total);
    for (std::size_t k = 0; k < k_total; ++k)
      per_pred[k] = detail::detection_scores(sc.reference, sc.predictions[k], names, infos, grid,
                                             base, cfg.multi_class);
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::vector<std::vector<double>> scores(k_total);
      for (std::size_t k = 0; k < k_total; ++k) scores[k] = per_pred[k][c];
      detail::fold_sanity_trial(infos[c], grid, scores, sc.true_ranks, even_grid, accs[c]);
    }
  }

  SanityOutcome out;
  out.thresholds = grid;
  out.trials = cfg.trials;
  out.algorithms = static_cast<std::size_t>(cfg.algorithms);
  for (std::size_t c = 0; c < names.size(); ++c)
    out.criteria.push_back(detail::summarize_sanity(names[c], infos[c], grid, accs[c]));
  return out;
}

// Monte Carlo sanity run for tracking. A per-pair frame context is built
// once per prediction and shared across criteria and thresholds.
inline SanityOutcome run_tracking_sanity(const TrackingSanityConfig& cfg,
                                         const std::vector<std::string>& names,
                                         const std::vector<double>& grid, BaseDistance base) {
  detail::require_increasing(grid);
  if (cfg.trials < 1) throw std::invalid_argument("trial count must be positive");
  if (grid.empty()) throw std::invalid_argument("threshold grid must be non-empty");
  std::vector<CriterionInfo> infos;
  for (const std::string& name : names)
    infos.push_back(criterion_info(tracking_criterion_catalog(), name));
  const bool even_grid = detail::evenly_spaced(grid);
  std::vector<detail::SanityAcc> accs(names.size());
  for (std::size_t c = 0; c < names.size(); ++c)
    accs[c].error.resize(infos[c].thresholded ? grid.size() : 1);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const TrackingScenario sc = gen_tracking_scenario(cfg, rng);
    const std::size_t k_total = sc.predictions.size();
    std::vector<std::vector<std::vector<double>>> per_pred(k_total);
    for (std::size_t k = 0; k < k_total; ++k)
      per_pred[k] =
          detail::tracking_scores(sc.reference, sc.predictions[k], names, infos, grid, base);
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::vector<std::vector<double>> scores(k_total);
      for (std::size_t k = 0; k < k_total; ++k) scores[k] = per_pred[k][c];
      detail::fold_sanity_trial(infos[c], grid, scores, sc.true_ranks, even_grid, accs[c]);
    }
  }

  SanityOutcome out;
  out.thresholds = grid;
  out.trials = cfg.trials;
  out.algorithms = static_cast<std::size_t>(cfg.algorithms);
  for (std::size_t c = 0; c < names.size(); ++c)
    out.criteria.push_back(detail::summarize_sanity(names[c], infos[c], grid, accs[c]));
  return out;
}

// Paired ranking errors with the exact reference versus a perturbed
// "approximate truth" reference, per criterion and grid point.
struct ConsistencyCriterionSummary {
  std::string name;
  bool thresholded = false;
  bool higher_better = false;
  std::vector<Stats> truth_error;
  std::vector<Stats> approx_error;
};

struct ConsistencyOutcome {
  std::vector<double> thresholds;
  int trials = 0;
  double min_iou = 0.0;
  std::size_t algorithms = 0;
  std::vector<ConsistencyCriterionSummary> criteria;
};

inline ConsistencyOutcome run_detection_consistency(const DetectionSanityConfig& cfg,
                                                    const std::vector<std::string>& names,
                                                    const std::vector<double>& grid,
                                                    BaseDistance base, double min_iou = 0.9) {
  detail::require_increasing(grid);
  if (cfg.trials < 1) throw std::invalid_argument("trial count must be positive");
  if (grid.empty()) throw std::invalid_argument("threshold grid must be non-empty");
  std::vector<CriterionInfo> infos;
  for (const std::string& name : names) {
    const CriterionInfo info = criterion_info(detection_criterion_catalog(), name);
    if (info.needs_classes && !cfg.multi_class)
      throw std::invalid_argument("criterion '" + name + "' requires the multi-class scenario");
    infos.push_back(info);
  }
  std::vector<std::vector<detail::StatAcc>> truth_acc(names.size()), approx_acc(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    truth_acc[c].resize(infos[c].thresholded ? grid.size() : 1);
    approx_acc[c].resize(infos[c].thresholded ? grid.size() : 1);
  }

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const DetectionScenario sc = gen_detection_scenario(cfg, rng);
    const ShapeSet approx = perturb_to_approximate_truth(sc.reference, min_iou, rng);
    const std::size_t k_total = sc.predictions.size();
    std::vector<double> column(k_total);
    for (const bool use_approx : {false, true}) {
      const ShapeSet& ref = use_approx ? approx : sc.reference;
      std::vector<std::vector<std::vector<double>>> per_pred(k_total);
      for (std::size_t k = 0; k < k_total; ++k)
        per_pred[k] = detail::detection_scores(ref, sc.predictions[k], names, infos, grid, base,
                                               cfg.multi_class);
      for (std::size_t c = 0; c < names.size(); ++c) {
        const std::size_t cols = infos[c].thresholded ? grid.size() : 1;
        for (std::size_t j = 0; j < cols; ++j) {
          for (std::size_t k = 0; k < k_total; ++k) column[k] = per_pred[k][c][j];
          const double err = kendall_tau_normalized(
              ranks_from_scores(column, infos[c].higher_better), sc.true_ranks);
          (use_approx ? approx_acc : truth_acc)[c][j].add(err);
        }
      }
    }
  }

  ConsistencyOutcome out;
  out.thresholds = grid;
  out.trials = cfg.trials;
  out.min_iou = min_iou;
  out.algorithms = static_cast<std::size_t>(cfg.algorithms);
  for (std::size_t c = 0; c < names.size(); ++c) {
    ConsistencyCriterionSummary s;
    s.name = names[c];
    s.thresholded = infos[c].thresholded;
    s.higher_better = infos[c].higher_better;
    for (const auto& a : truth_acc[c]) s.truth_error.push_back(a.stats());
    for (const auto& a : approx_acc[c]) s.approx_error.push_back(a.stats());
    out.criteria.push_back(std::move(s));
  }
  return out;
}

inline ConsistencyOutcome run_tracking_consistency(const TrackingSanityConfig& cfg,
                                                   const std::vector<std::string>& names,
                                                   const std::vector<double>& grid,
                                                   BaseDistance base, double min_iou = 0.9) {
  detail::require_increasing(grid);
  if (cfg.trials < 1) throw std::invalid_argument("trial count must be positive");
  if (grid.empty()) throw std::invalid_argument("threshold grid must be non-empty");
  std::vector<CriterionInfo> infos;
  for (const std::string& name : names)
    infos.push_back(criterion_info(tracking_criterion_catalog(), name));
  std::vector<std::vector<detail::StatAcc>> truth_acc(names.size()), approx_acc(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    truth_acc[c].resize(infos[c].thresholded ? grid.size() : 1);
    approx_acc[c].resize(infos[c].thresholded ? grid.size() : 1);
  }

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const TrackingScenario sc = gen_tracking_scenario(cfg, rng);
    const TrackSet approx = perturb_to_approximate_truth(sc.reference, min_iou, rng);
    const std::size_t k_total = sc.predictions.size();
    std::vector<double> column(k_total);
    for (const bool use_approx : {false, true}) {
      const TrackSet& ref = use_approx ? approx : sc.reference;
      std::vector<std::vector<std::vector<double>>> per_pred(k_total);
      for (std::size_t k = 0; k < k_total; ++k)
        per_pred[k] = detail::tracking_scores(ref, sc.predictions[k], names, infos, grid, base);
      for (std::size_t c = 0; c < names.size(); ++c) {
        const std::size_t cols = infos[c].thresholded ? grid.size() : 1;
        for (std::size_t j = 0; j < cols; ++j) {
          for (std::size_t k = 0; k < k_total; ++k) column[k] = per_pred[k][c][j];
          const double err = kendall_tau_normalized(
              ranks_from_scores(column, infos[c].higher_better), sc.true_ranks);
          (use_approx ? approx_acc : truth_acc)[c][j].add(err);
        }
      }
    }
  }

  ConsistencyOutcome out;
  out.thresholds = grid;
  out.trials = cfg.trials;
  out.min_iou = min_iou;
  out.algorithms = static_cast<std::size_t>(cfg.algorithms);
  for (std::size_t c = 0; c < names.size(); ++c) {
    ConsistencyCriterionSummary s;
    s.name = names[c];
    s.thresholded = infos[c].thresholded;
    s.higher_better = infos[c].higher_better;
    for (const auto& a : truth_acc[c]) s.truth_error.push_back(a.stats());
    for (const auto& a : approx_acc[c]) s.approx_error.push_back(a.stats());
    out.criteria.push_back(std::move(s));
  }
  return out;
}

// Closed-form doubling sweep: normalized set distances must shrink with the
// level while the un-normalized total grows, even though every level's
// prediction is unambiguously better than the last.
struct ScaleSweepRow {
  int level = 0;
  std::int64_t objects = 0;
  double shift = 0.0;
  double per_object = 0.0;  // closed-form IoU distance of each shifted pair
  double hausdorff = 0.0;
  double emd = 0.0;
  double ospa = 0.0;
  double ospa_unnormalized = 0.0;
  double f1_dissimilarity = 0.0;
};

inline std::vector<ScaleSweepRow> run_scale_sweep(int max_level = 10, double threshold = 0.5) {
  if (max_level < 1) throw std::invalid_argument("level count must be positive");
  std::vector<ScaleSweepRow> rows;
  const MetricConfig cfg{BaseDistance::Iou, 1.0, 1.0};
  for (int level = 1; level <= max_level; ++level) {
    const ScaleSweepCase c = scale_sweep_case(level);
    ScaleSweepRow row;
    row.level = level;
    row.objects = c.objects;
    row.shift = c.shift;
    row.per_object = 2.0 * c.shift / (c.object_size + c.shift);
    row.hausdorff = hausdorff(c.reference, c.prediction, cfg);
    row.emd = emd(c.reference, c.prediction, cfg);
    row.ospa = ospa(c.reference, c.prediction, cfg);
    row.ospa_unnormalized = ospa_unnormalized(c.reference, c.prediction, cfg);
    row.f1_dissimilarity = 1.0 - f1_score(c.reference, c.prediction, threshold, cfg.base).f1;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shapeval
