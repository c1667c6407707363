#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shapeval/assignment.hpp"
#include "shapeval/track_metrics.hpp"

namespace shapeval {

namespace detail {

// Per-frame view of a (reference, prediction) track-set pair: which tracks
// exist at each step and their pairwise base distances. Built once and
// shared by all thresholded tracking criteria.
struct TrackPairContext {
  std::vector<int> times;
  std::vector<std::vector<std::size_t>> gt_at;  // per frame: reference track indices
  std::vector<std::vector<std::size_t>> pr_at;
  std::vector<CostMatrix> dist;                 // per frame: |gt_at| x |pr_at|
  std::vector<std::int64_t> gt_count, pr_count;  // instances per track
  std::int64_t gt_total = 0, pr_total = 0;
  std::size_t n_gt = 0, n_pr = 0;
};

inline TrackPairContext make_track_context(const TrackSet& ref, const TrackSet& pred,
                                           BaseDistance base) {
  require_same_window(ref, pred);
  TrackPairContext ctx;
  ctx.n_gt = ref.size();
  ctx.n_pr = pred.size();
  ctx.gt_count.assign(ref.size(), 0);
  ctx.pr_count.assign(pred.size(), 0);
  for (int t = ref.t_begin; t <= ref.t_end; ++t) {
    std::vector<std::size_t> g, p;
    for (std::size_t i = 0; i < ref.size(); ++i)
      if (ref.tracks[i].exists_at(t)) g.push_back(i);
    for (std::size_t j = 0; j < pred.size(); ++j)
      if (pred.tracks[j].exists_at(t)) p.push_back(j);
    if (g.empty() && p.empty()) continue;
    CostMatrix d(g.size(), p.size());
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b)
        d.at(a, b) = base_distance(ref.tracks[g[a]].states.at(t),
                                   pred.tracks[p[b]].states.at(t), base);
    for (std::size_t a = 0; a < g.size(); ++a) ++ctx.gt_count[g[a]];
    for (std::size_t b = 0; b < p.size(); ++b) ++ctx.pr_count[p[b]];
    ctx.gt_total += static_cast<std::int64_t>(g.size());
    ctx.pr_total += static_cast<std::int64_t>(p.size());
    ctx.times.push_back(t);
    ctx.gt_at.push_back(std::move(g));
    ctx.pr_at.push_back(std::move(p));
    ctx.dist.push_back(std::move(d));
  }
  return ctx;
}

}  // namespace detail

struct MotaResult {
  std::int64_t misses = 0;
  std::int64_t false_positives = 0;
  std::int64_t switches = 0;
  std::int64_t gt_instances = 0;
  double mota = 0.0;
};

namespace detail {

inline MotaResult mota_impl(const TrackPairContext& ctx, double maxd) {
  MotaResult r;
  r.gt_instances = ctx.gt_total;
  std::vector<std::int64_t> last_match(ctx.n_gt, -1);
  for (std::size_t f = 0; f < ctx.times.size(); ++f) {
    const auto& gt = ctx.gt_at[f];
    const auto& pr = ctx.pr_at[f];
    const CostMatrix& d = ctx.dist[f];
    std::vector<std::int64_t> pred_of_gt(gt.size(), -1);
    std::vector<char> pred_used(pr.size(), 0);
    // Correspondences from earlier frames persist while still overlapping.
    for (std::size_t a = 0; a < gt.size(); ++a) {
      const std::int64_t lm = last_match[gt[a]];
      if (lm < 0) continue;
      for (std::size_t b = 0; b < pr.size(); ++b) {
        if (pred_used[b] || static_cast<std::int64_t>(pr[b]) != lm) continue;
        if (d.at(a, b) <= maxd) {
          pred_of_gt[a] = static_cast<std::int64_t>(b);
          pred_used[b] = 1;
        }
        break;
      }
    }
    // Remaining instances pair up by optimal assignment under the threshold.
    std::vector<std::size_t> free_g, free_p;
    for (std::size_t a = 0; a < gt.size(); ++a)
      if (pred_of_gt[a] < 0) free_g.push_back(a);
    for (std::size_t b = 0; b < pr.size(); ++b)
      if (!pred_used[b]) free_p.push_back(b);
    if (!free_g.empty() && !free_p.empty()) {
      CostMatrix sub(free_g.size(), free_p.size());
      for (std::size_t a = 0; a < free_g.size(); ++a)
        for (std::size_t b = 0; b < free_p.size(); ++b)
          sub.at(a, b) = d.at(free_g[a], free_p[b]);
      const Matching m = solve_assignment_capped(sub, maxd);
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        const std::int64_t b = m.row_to_col[a];
        if (b < 0) continue;
        pred_of_gt[free_g[a]] = static_cast<std::int64_t>(free_p[static_cast<std::size_t>(b)]);
        pred_used[free_p[static_cast<std::size_t>(b)]] = 1;
      }
    }
    std::int64_t matched = 0;
    for (std::size_t a = 0; a < gt.size(); ++a) {
      const std::int64_t b = pred_of_gt[a];
      if (b < 0) continue;
      ++matched;
      const std::int64_t track = static_cast<std::int64_t>(pr[static_cast<std::size_t>(b)]);
      if (last_match[gt[a]] >= 0 && last_match[gt[a]] != track) ++r.switches;
      last_match[gt[a]] = track;
    }
    r.misses += static_cast<std::int64_t>(gt.size()) - matched;
    r.false_positives += static_cast<std::int64_t>(pr.size()) - matched;
  }
  if (r.gt_instances == 0) {
    r.mota = (ctx.pr_total == 0) ? 1.0 : 0.0;
    return r;
  }
  r.mota = 1.0 - static_cast<double>(r.misses + r.false_positives + r.switches) /
                     static_cast<double>(r.gt_instances);
  return r;
}

}  // namespace detail

// Multiple-object tracking accuracy: one minus the rate of misses, false
// positives and identity switches per reference instance. Matches persist
// across frames while they keep overlapping; a switch is counted whenever a
// reference track pairs with a different prediction than it last did.
// Unbounded below; 1 is perfect.
inline MotaResult mota(const TrackSet& ref, const TrackSet& pred, double threshold,
                       BaseDistance base = BaseDistance::Iou) {
  const auto ctx = detail::make_track_context(ref, pred, base);
  return detail::mota_impl(ctx, max_match_distance(base, threshold));
}

namespace detail {

inline double idf1_impl(const TrackPairContext& ctx, double maxd) {
  const std::size_t ng = ctx.n_gt, np = ctx.n_pr;
  std::int64_t len_sum = ctx.gt_total + ctx.pr_total;
  if (len_sum == 0) return 1.0;
  // Frames where both tracks exist and overlap, per track pair.
  std::vector<std::int64_t> overlap(ng * np, 0);
  for (std::size_t f = 0; f < ctx.times.size(); ++f) {
    const auto& gt = ctx.gt_at[f];
    const auto& pr = ctx.pr_at[f];
    for (std::size_t a = 0; a < gt.size(); ++a)
      for (std::size_t b = 0; b < pr.size(); ++b)
        if (ctx.dist[f].at(a, b) <= maxd) ++overlap[gt[a] * np + pr[b]];
  }
  // Global trajectory pairing with dummies so tracks may stay unpaired.
  const std::size_t n = ng + np;
  const double big = static_cast<double>(len_sum) + 1.0;
  CostMatrix c(n, n, big);
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < np; ++j)
      c.at(i, j) = static_cast<double>(ctx.gt_count[i] + ctx.pr_count[j] -
                                       2 * overlap[i * np + j]);
  for (std::size_t i = 0; i < ng; ++i)
    c.at(i, np + i) = static_cast<double>(ctx.gt_count[i]);
  for (std::size_t j = 0; j < np; ++j)
    c.at(ng + j, j) = static_cast<double>(ctx.pr_count[j]);
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < np; ++j) c.at(ng + j, np + i) = 0.0;
  const Matching m = solve_assignment(c);
  const double idtp = 0.5 * (static_cast<double>(len_sum) - m.total_cost);
  return 2.0 * idtp / static_cast<double>(len_sum);
}

}  // namespace detail

// Identity F1: trajectories pair up globally (at most one prediction per
// reference track and vice versa); the score is the harmonic mean of identity
// precision and recall induced by that pairing. Range [0, 1].
inline double idf1(const TrackSet& ref, const TrackSet& pred, double threshold,
                   BaseDistance base = BaseDistance::Iou) {
  const auto ctx = detail::make_track_context(ref, pred, base);
  return detail::idf1_impl(ctx, max_match_distance(base, threshold));
}

namespace detail {

inline double hota_impl(const TrackPairContext& ctx, double maxd) {
  if (ctx.gt_total + ctx.pr_total == 0) return 1.0;
  const std::size_t ng = ctx.n_gt, np = ctx.n_pr;
  // Global alignment: Jaccard overlap of co-located frames per track pair,
  // used to steer per-frame matching toward consistent identities.
  std::vector<std::int64_t> cofeasible(ng * np, 0);
  for (std::size_t f = 0; f < ctx.times.size(); ++f) {
    const auto& gt = ctx.gt_at[f];
    const auto& pr = ctx.pr_at[f];
    for (std::size_t a = 0; a < gt.size(); ++a)
      for (std::size_t b = 0; b < pr.size(); ++b)
        if (ctx.dist[f].at(a, b) <= maxd) ++cofeasible[gt[a] * np + pr[b]];
  }
  std::vector<std::int64_t> matched(ng * np, 0);
  std::int64_t tp = 0;
  for (std::size_t f = 0; f < ctx.times.size(); ++f) {
    const auto& gt = ctx.gt_at[f];
    const auto& pr = ctx.pr_at[f];
    if (gt.empty() || pr.empty()) continue;
    // Maximize the match count first, then the total alignment.
    CostMatrix c(gt.size(), pr.size(), 2.0);
    for (std::size_t a = 0; a < gt.size(); ++a) {
      for (std::size_t b = 0; b < pr.size(); ++b) {
        if (ctx.dist[f].at(a, b) > maxd) continue;
        const std::size_t pair = gt[a] * np + pr[b];
        const double align =
            static_cast<double>(cofeasible[pair]) /
            static_cast<double>(ctx.gt_count[gt[a]] + ctx.pr_count[pr[b]] - cofeasible[pair]);
        c.at(a, b) = 1.0 - align;
      }
    }
    const Matching m = solve_assignment_capped(c, 1.0);
    for (std::size_t a = 0; a < gt.size(); ++a) {
      const std::int64_t b = m.row_to_col[a];
      if (b < 0) continue;
      ++matched[gt[a] * np + pr[static_cast<std::size_t>(b)]];
      ++tp;
    }
  }
  double assoc_sum = 0.0;
  for (std::size_t i = 0; i < ng; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const std::int64_t m_ij = matched[i * np + j];
      if (m_ij == 0) continue;
      const double a_ij = static_cast<double>(m_ij) /
                          static_cast<double>(ctx.gt_count[i] + ctx.pr_count[j] - m_ij);
      assoc_sum += static_cast<double>(m_ij) * a_ij;
    }
  }
  const double denom = static_cast<double>(ctx.gt_total + ctx.pr_total - tp);
  return std::sqrt(assoc_sum / denom);
}

}  // namespace detail

// Detection/association score at localization threshold alpha: the square
// root of the mean association accuracy over true positives, with misses and
// false positives diluting the mean. Range [0, 1].
inline double hota(const TrackSet& ref, const TrackSet& pred, double alpha,
                   BaseDistance base = BaseDistance::Iou) {
  const auto ctx = detail::make_track_context(ref, pred, base);
  return detail::hota_impl(ctx, max_match_distance(base, alpha));
}

inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid(19);
  for (int i = 0; i < 19; ++i) grid[static_cast<std::size_t>(i)] = 0.05 * (i + 1);
  return grid;
}

// Mean score over a grid of localization thresholds.
inline double hota_marginal(const TrackSet& ref, const TrackSet& pred,
                            BaseDistance base = BaseDistance::Iou,
                            const std::vector<double>& alphas = default_alpha_grid()) {
  if (alphas.empty()) throw std::invalid_argument("alpha grid must be non-empty");
  const auto ctx = detail::make_track_context(ref, pred, base);
  double total = 0.0;
  for (double a : alphas) total += detail::hota_impl(ctx, max_match_distance(base, a));
  return total / static_cast<double>(alphas.size());
}

}  // namespace shapeval
