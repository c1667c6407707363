#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "shapeval/set_metrics.hpp"

namespace shapeval {

// A labelled trajectory: one shape per time step on which the track exists.
// Gaps in the domain model fragmented tracks.
struct Track {
  std::int64_t label = 0;
  std::map<int, Shape> states;

  bool exists_at(int t) const { return states.count(t) != 0; }
};

// All tracks of one sequence over a common inclusive time window.
struct TrackSet {
  int t_begin = 0;
  int t_end = -1;
  std::vector<Track> tracks;

  bool empty() const { return tracks.empty(); }
  std::size_t size() const { return tracks.size(); }

  void validate() const {
    std::map<std::int64_t, int> seen;
    for (const Track& tr : tracks) {
      if (++seen[tr.label] > 1) throw std::invalid_argument("duplicate track label");
      for (const auto& [t, s] : tr.states) {
        (void)s;
        if (t < t_begin || t > t_end)
          throw std::invalid_argument("track state outside the set window");
      }
    }
  }
};

// Time-averaged distance between two tracks: over every instant where at
// least one of them exists, the single-state per-object distance (the cut
// base distance when both exist, the cut-off when only one does), averaged.
// Zero when neither track ever exists.
inline double track_base_distance(const Track& f, const Track& g,
                                  const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  std::size_t instants = 0;
  double sum = 0.0;
  auto it_f = f.states.begin();
  auto it_g = g.states.begin();
  while (it_f != f.states.end() || it_g != g.states.end()) {
    ++instants;
    if (it_g == g.states.end() || (it_f != f.states.end() && it_f->first < it_g->first)) {
      sum += cfg.cutoff;
      ++it_f;
    } else if (it_f == f.states.end() || it_g->first < it_f->first) {
      sum += cfg.cutoff;
      ++it_g;
    } else {
      sum += detail::cut_distance(it_f->second, it_g->second, cfg);
      ++it_f;
      ++it_g;
    }
  }
  if (instants == 0) return 0.0;
  return sum / static_cast<double>(instants);
}

namespace detail {

inline void require_same_window(const TrackSet& x, const TrackSet& y) {
  if (x.t_begin != y.t_begin || x.t_end != y.t_end)
    throw std::invalid_argument("track sets must share one time window");
}

inline CostMatrix track_costs(const TrackSet& x, const TrackSet& y,
                              const MetricConfig& cfg, double power) {
  CostMatrix c(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      c.at(i, j) = std::pow(track_base_distance(x.tracks[i], y.tracks[j], cfg), power);
  return c;
}

}  // namespace detail

// Per-track assignment distance over whole trajectories: the per-object
// construction applied with the time-averaged track distance as base.
inline double ospa2(const TrackSet& x, const TrackSet& y, const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  detail::require_same_window(x, y);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) return cfg.cutoff;
  const bool flip = x.size() > y.size();
  const TrackSet& small = flip ? y : x;
  const TrackSet& large = flip ? x : y;
  const CostMatrix c = detail::track_costs(small, large, cfg, cfg.order);
  const Matching m = solve_assignment(c);
  const double penalty = std::pow(cfg.cutoff, cfg.order) *
                         static_cast<double>(large.size() - small.size());
  const double n = static_cast<double>(large.size());
  return std::pow((m.total_cost + penalty) / n, 1.0 / cfg.order);
}

// Hausdorff distance over whole trajectories with the time-averaged track
// distance as base.
inline double hausdorff_tracks(const TrackSet& x, const TrackSet& y,
                               const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  detail::require_same_window(x, y);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) return cfg.cutoff;
  const CostMatrix c = detail::track_costs(x, y, cfg, 1.0);
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

// Optimal transport distance over whole trajectories with the time-averaged
// track distance as base.
inline double emd_tracks(const TrackSet& x, const TrackSet& y, const MetricConfig& cfg = {}) {
  detail::require_config(cfg);
  detail::require_same_window(x, y);
  if (x.empty() && y.empty()) return 0.0;
  if (x.empty() || y.empty()) return cfg.cutoff;
  const CostMatrix c = detail::track_costs(x, y, cfg, cfg.order);
  const TransportPlan plan = solve_transport(c);
  return std::pow(plan.total_cost, 1.0 / cfg.order);
}

}  // namespace shapeval
