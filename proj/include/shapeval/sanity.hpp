#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "shapeval/geometry.hpp"
#include "shapeval/random.hpp"
#include "shapeval/set_metrics.hpp"
#include "shapeval/track_metrics.hpp"

namespace shapeval {

// Synthetic single-image scenarios: one reference set and a batch of
// prediction sets whose quality degrades with their index, so the index
// order is the ground-truth ranking an evaluation criterion should recover.
struct DetectionSanityConfig {
  int trials = 100;
  std::uint64_t seed = 1;
  int algorithms = 20;
  bool multi_class = false;
  int classes = 5;
  int min_objects = 5;
  int max_objects = 40;
  double arena_half = 200.0;
  double size_min = 20.0;
  double size_max = 40.0;
  double disloc_min = 10.0;   // worst-object dislocation of the best predictor
  double disloc_max = 20.0;   // ... of the worst predictor
  double score_fade_min = 0.2;
  double score_fade_max = 0.8;
  double size_noise = 0.05;
  double p_detect_min = 0.5;  // detection probability range, degraded half
  double p_detect_max = 0.95;
  double p_class_min = 0.5;   // correct-classification probability range
  double p_class_max = 0.95;
  double f_state_min = 0.05;  // state-dependent false fraction range
  double f_state_max = 0.5;
};

struct DetectionScenario {
  ShapeSet reference;
  std::vector<ShapeSet> predictions;
  std::vector<int> true_ranks;
  int objects = 0;
  // Degradation parameters of the worse half, kept for scenario dumps.
  std::vector<double> p_detect, p_class, f_state;
  std::vector<int> f_random;
};

struct TrackingSanityConfig {
  int trials = 100;
  std::uint64_t seed = 1;
  int algorithms = 20;
  int window = 100;
  int min_tracks = 5;
  int max_tracks = 30;
  int min_length = 50;
  int max_length = 100;
  double arena_half = 200.0;
  double height_min = 20.0;
  double height_max = 40.0;
  double aspect_min = 0.5;
  double aspect_max = 1.5;
  double speed_min = 1.0;
  double speed_max = 5.0;
  double disloc_min = 20.0;
  double disloc_max = 40.0;
  double size_noise = 0.05;
  double p_min = 0.05;         // range of the per-set degradation probabilities
  double p_max = 1.0;
  int false_track_length = 10;
  double swap_floor_pct = 15.0;
};

struct TrackingScenario {
  TrackSet reference;
  std::vector<TrackSet> predictions;
  std::vector<int> true_ranks;
  int tracks = 0;
  std::vector<double> p_fragment, p_state_false, p_id_swap;
  std::vector<int> n_random_false;
};

namespace detail {

// Dislocation vector of a given magnitude: the x component takes a uniform
// share of the magnitude, the y component the complement, and both signs
// flip independently.
inline std::pair<double, double> dislocation(Rng& rng, double magnitude) {
  const double u = uniform_real(rng, 0.0, 1.0);
  double dx = u * magnitude;
  double dy = std::sqrt(std::max(magnitude * magnitude - dx * dx, 0.0));
  if (uniform_real(rng, 0.0, 1.0) > 0.5) dx = -dx;
  if (uniform_real(rng, 0.0, 1.0) > 0.5) dy = -dy;
  return {dx, dy};
}

inline Shape dislocated_box(const Box& b, double magnitude, double size_noise, Rng& rng) {
  const auto [dx, dy] = dislocation(rng, magnitude);
  const double cx = b.center_x() + dx;
  const double cy = b.center_y() + dy;
  const double w = b.width() * uniform_real(rng, 1.0 - size_noise, 1.0 + size_noise);
  const double h = b.height() * uniform_real(rng, 1.0 - size_noise, 1.0 + size_noise);
  return Shape::make_box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

// First `take` elements of a partial Fisher-Yates shuffle of `values`.
inline std::vector<int> sample_without_replacement(std::vector<int> values, std::size_t take,
                                                   Rng& rng) {
  take = std::min(take, values.size());
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = static_cast<std::size_t>(
        uniform_int(rng, static_cast<int>(i), static_cast<int>(values.size()) - 1));
    std::swap(values[i], values[j]);
  }
  values.resize(take);
  return values;
}

inline std::int64_t round_count(double x) {
  return std::max<std::int64_t>(std::llround(x), 0);
}

// Evenly spaced degradation magnitudes, best predictor first.
inline std::vector<double> even_grid(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    v[static_cast<std::size_t>(i)] =
        (count == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return v;
}

}  // namespace detail

inline DetectionScenario gen_detection_scenario(const DetectionSanityConfig& cfg, Rng& rng) {
  if (cfg.algorithms < 2 || cfg.algorithms % 2 != 0)
    throw std::invalid_argument("algorithm count must be even and at least 2");
  if (cfg.min_objects < 1 || cfg.max_objects < cfg.min_objects)
    throw std::invalid_argument("invalid object count range");
  const int k_total = cfg.algorithms;
  const int k_clean = k_total / 2;

  DetectionScenario sc;
  sc.objects = uniform_int(rng, cfg.min_objects, cfg.max_objects);
  const int n_obj = sc.objects;
  for (int n = 1; n <= n_obj; ++n) {
    const double cx = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
    const double cy = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
    const double w = uniform_real(rng, cfg.size_min, cfg.size_max);
    const double h = uniform_real(rng, cfg.size_min, cfg.size_max);
    Shape s = Shape::make_box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
    if (cfg.multi_class)
      s = s.with_score(1.0).with_category(uniform_int(rng, 1, cfg.classes));
    sc.reference.shapes.push_back(std::move(s));
  }

  const std::vector<double> disloc = detail::even_grid(cfg.disloc_min, cfg.disloc_max, k_total);
  const std::vector<double> fade =
      detail::even_grid(cfg.score_fade_min, cfg.score_fade_max, k_total);
  const int k_degraded = k_total - k_clean;
  for (int j = 0; j < k_degraded; ++j) {
    sc.p_detect.push_back(uniform_real(rng, cfg.p_detect_min, cfg.p_detect_max));
    sc.p_class.push_back(uniform_real(rng, cfg.p_class_min, cfg.p_class_max));
    sc.f_state.push_back(uniform_real(rng, cfg.f_state_min, cfg.f_state_max));
    sc.f_random.push_back(poisson(rng, static_cast<double>(j) + 1.0));
  }
  std::sort(sc.p_detect.rbegin(), sc.p_detect.rend());
  std::sort(sc.p_class.rbegin(), sc.p_class.rend());
  std::sort(sc.f_state.begin(), sc.f_state.end());
  std::sort(sc.f_random.begin(), sc.f_random.end());

  for (int k = 0; k < k_total; ++k) {
    const double a = disloc[static_cast<std::size_t>(k)] / n_obj;
    const double b = fade[static_cast<std::size_t>(k)] / n_obj;
    std::vector<char> has_false(static_cast<std::size_t>(n_obj) + 1, 0);
    std::vector<char> missed(static_cast<std::size_t>(n_obj) + 1, 0);
    std::vector<char> wrong_class(static_cast<std::size_t>(n_obj) + 1, 0);
    int n_random_false = 0;
    if (k >= k_clean) {
      const auto j = static_cast<std::size_t>(k - k_clean);
      std::vector<int> labels(static_cast<std::size_t>(n_obj));
      for (int n = 1; n <= n_obj; ++n) labels[static_cast<std::size_t>(n - 1)] = n;
      const std::int64_t n_sdf = detail::round_count(n_obj * sc.f_state[j]);
      for (int n : detail::sample_without_replacement(labels, static_cast<std::size_t>(n_sdf), rng))
        has_false[static_cast<std::size_t>(n)] = 1;
      // Misses and misclassifications hit the largest remaining labels, the
      // objects with the worst dislocation.
      std::vector<int> remaining;
      for (int n = 1; n <= n_obj; ++n)
        if (!has_false[static_cast<std::size_t>(n)]) remaining.push_back(n);
      std::int64_t n_miss =
          detail::round_count(static_cast<double>(n_obj - n_sdf) * (1.0 - sc.p_detect[j]));
      n_miss = std::min<std::int64_t>(n_miss, static_cast<std::int64_t>(remaining.size()));
      for (std::int64_t i = 0; i < n_miss; ++i)
        missed[static_cast<std::size_t>(remaining[remaining.size() - 1 - static_cast<std::size_t>(i)])] = 1;
      if (cfg.multi_class) {
        remaining.resize(remaining.size() - static_cast<std::size_t>(n_miss));
        std::int64_t n_wrong = detail::round_count(
            static_cast<double>(n_obj - n_sdf - n_miss) * (1.0 - sc.p_class[j]));
        n_wrong = std::min<std::int64_t>(n_wrong, static_cast<std::int64_t>(remaining.size()));
        for (std::int64_t i = 0; i < n_wrong; ++i)
          wrong_class[static_cast<std::size_t>(remaining[remaining.size() - 1 - static_cast<std::size_t>(i)])] = 1;
      }
      n_random_false = sc.f_random[j];
    }

    ShapeSet pred;
    for (int n = 1; n <= n_obj; ++n) {
      if (missed[static_cast<std::size_t>(n)]) continue;
      const Shape& truth = sc.reference.shapes[static_cast<std::size_t>(n - 1)];
      Shape p = detail::dislocated_box(truth.box, a * n, cfg.size_noise, rng);
      if (cfg.multi_class) {
        int cls = *truth.category;
        if (wrong_class[static_cast<std::size_t>(n)]) {
          const int shift = uniform_int(rng, 1, cfg.classes - 1);
          cls = (cls - 1 + shift) % cfg.classes + 1;
        }
        p = p.with_score(1.0 - b * n).with_category(cls);
      }
      pred.shapes.push_back(p);
      if (has_false[static_cast<std::size_t>(n)]) {
        // Duplicate with an independent dislocation of the same magnitude.
        Shape dup = detail::dislocated_box(truth.box, a * n, cfg.size_noise, rng);
        if (cfg.multi_class) dup = dup.with_score(*p.score).with_category(*p.category);
        pred.shapes.push_back(std::move(dup));
      }
    }
    for (int f = 0; f < n_random_false; ++f) {
      const double cx = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
      const double cy = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
      const double w = uniform_real(rng, cfg.size_min, cfg.size_max);
      const double h = uniform_real(rng, cfg.size_min, cfg.size_max);
      Shape s = Shape::make_box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
      if (cfg.multi_class)
        s = s.with_score(1.0 - uniform_real(rng, 0.0, 1.0))
                .with_category(uniform_int(rng, 1, cfg.classes));
      pred.shapes.push_back(std::move(s));
    }
    sc.predictions.push_back(std::move(pred));
  }
  sc.true_ranks.resize(static_cast<std::size_t>(k_total));
  for (int k = 0; k < k_total; ++k) sc.true_ranks[static_cast<std::size_t>(k)] = k + 1;
  return sc;
}

// Likelihood that two overlapping predicted tracks swap identities, as a
// function of their mutual IoU in percent. Zero up to floor_pct, one from
// theta upward, and a continuous piecewise-quadratic ramp in between that
// crosses one half at the midpoint.
inline double swap_likelihood(double mutual_iou_pct, double theta, double floor_pct = 15.0) {
  if (mutual_iou_pct >= theta) return 1.0;
  if (mutual_iou_pct <= floor_pct) return 0.0;
  const double u = (mutual_iou_pct - floor_pct) / (theta - floor_pct);
  if (u <= 0.5) return 2.0 * u * u;
  return 1.0 - 2.0 * (1.0 - u) * (1.0 - u);
}

namespace detail {

struct TrackSlot {
  std::int64_t label = 0;
  std::map<int, Shape> states;
};

// Reference track height follows the vertical position: higher up means
// smaller, clamped below at the minimum height.
inline double height_at(const TrackingSanityConfig& cfg, double cy) {
  const double h = cfg.height_min + (cfg.height_max - cfg.height_min) *
                                        (cfg.arena_half - cy) / (2.0 * cfg.arena_half);
  return std::max(h, cfg.height_min);
}

inline Shape centered_box(double cx, double cy, double w, double h) {
  return Shape::make_box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

}  // namespace detail

inline TrackingScenario gen_tracking_scenario(const TrackingSanityConfig& cfg, Rng& rng) {
  if (cfg.algorithms < 2 || cfg.algorithms % 2 != 0)
    throw std::invalid_argument("algorithm count must be even and at least 2");
  if (cfg.min_tracks < 1 || cfg.max_tracks < cfg.min_tracks)
    throw std::invalid_argument("invalid track count range");
  if (cfg.window < cfg.max_length || cfg.window < cfg.false_track_length)
    throw std::invalid_argument("window too short for the configured track lengths");
  const int k_total = cfg.algorithms;
  const int k_clean = k_total / 2;

  TrackingScenario sc;
  sc.tracks = uniform_int(rng, cfg.min_tracks, cfg.max_tracks);
  const int n_trk = sc.tracks;
  sc.reference.t_begin = 1;
  sc.reference.t_end = cfg.window;
  for (int n = 1; n <= n_trk; ++n) {
    const int length = uniform_int(rng, cfg.min_length, cfg.max_length);
    const int t0 = uniform_int(rng, 1, cfg.window - length + 1);
    const double cx0 = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
    const double cy0 = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
    const double width = detail::height_at(cfg, cy0) * uniform_real(rng, cfg.aspect_min, cfg.aspect_max);
    const double course = uniform_real(rng, 0.0, 360.0) * std::acos(-1.0) / 180.0;
    const double speed = uniform_real(rng, cfg.speed_min, cfg.speed_max);
    const double vx = speed * std::cos(course);
    const double vy = speed * std::sin(course);
    Track tr;
    tr.label = n;
    for (int s = 0; s < length; ++s) {
      const double cx = cx0 + vx * s;
      const double cy = cy0 + vy * s;
      tr.states.emplace(t0 + s, detail::centered_box(cx, cy, width, detail::height_at(cfg, cy)));
    }
    sc.reference.tracks.push_back(std::move(tr));
  }

  const std::vector<double> disloc = detail::even_grid(cfg.disloc_min, cfg.disloc_max, k_total);
  const int k_degraded = k_total - k_clean;
  for (int j = 0; j < k_degraded; ++j) {
    sc.p_fragment.push_back(uniform_real(rng, cfg.p_min, cfg.p_max));
    sc.p_state_false.push_back(uniform_real(rng, cfg.p_min, cfg.p_max));
    sc.p_id_swap.push_back(uniform_real(rng, cfg.p_min, cfg.p_max));
    sc.n_random_false.push_back(poisson(rng, static_cast<double>(j) + 1.0));
  }
  std::sort(sc.p_fragment.begin(), sc.p_fragment.end());
  std::sort(sc.p_state_false.begin(), sc.p_state_false.end());
  std::sort(sc.p_id_swap.rbegin(), sc.p_id_swap.rend());
  std::sort(sc.n_random_false.begin(), sc.n_random_false.end());

  for (int k = 0; k < k_total; ++k) {
    const double alpha = disloc[static_cast<std::size_t>(k)] / n_trk;
    const bool degraded = k >= k_clean;
    const auto j = static_cast<std::size_t>(degraded ? k - k_clean : 0);

    std::vector<detail::TrackSlot> slots;
    std::int64_t next_label = n_trk + 1;
    // Perturbed copies of the reference tracks, one fresh dislocation and
    // size draw per instant.
    for (int n = 1; n <= n_trk; ++n) {
      const Track& truth = sc.reference.tracks[static_cast<std::size_t>(n - 1)];
      detail::TrackSlot slot;
      slot.label = n;
      for (const auto& [t, state] : truth.states)
        slot.states.emplace(
            t, detail::dislocated_box(state.box, alpha * n, cfg.size_noise, rng));
      slots.push_back(std::move(slot));
    }
    if (degraded) {
      // State-dependent false tracks: duplicates of chosen reference tracks
      // with independent dislocations of the same magnitude.
      std::vector<int> labels(static_cast<std::size_t>(n_trk));
      for (int n = 1; n <= n_trk; ++n) labels[static_cast<std::size_t>(n - 1)] = n;
      const std::int64_t n_sdf = detail::round_count(n_trk * sc.p_state_false[j]);
      for (int n : detail::sample_without_replacement(labels, static_cast<std::size_t>(n_sdf), rng)) {
        const Track& truth = sc.reference.tracks[static_cast<std::size_t>(n - 1)];
        detail::TrackSlot slot;
        slot.label = next_label++;
        for (const auto& [t, state] : truth.states)
          slot.states.emplace(
              t, detail::dislocated_box(state.box, alpha * n, cfg.size_noise, rng));
        slots.push_back(std::move(slot));
      }
      // Per-frame misses drop the instances of the largest labels.
      for (int t = 1; t <= cfg.window; ++t) {
        std::vector<std::size_t> present;
        for (std::size_t s = 0; s < static_cast<std::size_t>(n_trk); ++s)
          if (slots[s].states.count(t)) present.push_back(s);
        const std::int64_t n_drop =
            detail::round_count(static_cast<double>(present.size()) * sc.p_fragment[j]);
        for (std::int64_t i = 0; i < n_drop; ++i)
          slots[present[present.size() - 1 - static_cast<std::size_t>(i)]].states.erase(t);
      }
      // Random false tracks: short-lived, re-sampled every frame, no dynamics.
      for (int f = 0; f < sc.n_random_false[j]; ++f) {
        const int t0 = uniform_int(rng, 1, cfg.window - cfg.false_track_length + 1);
        detail::TrackSlot slot;
        slot.label = next_label++;
        for (int s = 0; s < cfg.false_track_length; ++s) {
          const double cx = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
          const double cy = uniform_real(rng, -cfg.arena_half, cfg.arena_half);
          const double h = uniform_real(rng, cfg.height_min, cfg.height_max);
          const double w = h * uniform_real(rng, cfg.aspect_min, cfg.aspect_max);
          slot.states.emplace(t0 + s, detail::centered_box(cx, cy, w, h));
        }
        slots.push_back(std::move(slot));
      }
    }

    // Assemble output tracks; in the degraded half, overlapping predictions
    // exchange identities and keep the exchanged labels from then on.
    std::vector<std::int64_t> label_of(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) label_of[s] = slots[s].label;
    std::map<std::int64_t, Track> out;
    const double theta = degraded ? 100.0 * sc.p_id_swap[j] : 0.0;
    for (int t = 1; t <= cfg.window; ++t) {
      std::vector<std::size_t> present;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (slots[s].states.count(t)) present.push_back(s);
      if (degraded && present.size() > 1) {
        struct Overlap {
          double iou_pct;
          std::size_t a, b;
        };
        std::vector<Overlap> pairs;
        for (std::size_t i = 0; i < present.size(); ++i) {
          for (std::size_t l = i + 1; l < present.size(); ++l) {
            const double pct = 100.0 * (1.0 - iou_distance(slots[present[i]].states.at(t),
                                                           slots[present[l]].states.at(t)));
            if (pct > 0.0) pairs.push_back({pct, present[i], present[l]});
          }
        }
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const Overlap& x, const Overlap& y) { return x.iou_pct > y.iou_pct; });
        for (const Overlap& p : pairs)
          if (swap_likelihood(p.iou_pct, theta, cfg.swap_floor_pct) > 0.5)
            std::swap(label_of[p.a], label_of[p.b]);
      }
      for (std::size_t s : present) {
        Track& tr = out[label_of[s]];
        tr.label = label_of[s];
        tr.states.emplace(t, slots[s].states.at(t));
      }
    }
    TrackSet pred;
    pred.t_begin = 1;
    pred.t_end = cfg.window;
    for (auto& [label, tr] : out) {
      (void)label;
      pred.tracks.push_back(std::move(tr));
    }
    sc.predictions.push_back(std::move(pred));
  }
  sc.true_ranks.resize(static_cast<std::size_t>(k_total));
  for (int k = 0; k < k_total; ++k) sc.true_ranks[static_cast<std::size_t>(k)] = k + 1;
  return sc;
}

// Reference perturbed into an "approximate truth": every box keeps its size
// and moves by a random dislocation re-drawn until the overlap with the
// original stays at or above min_iou. min_iou = 1 returns an exact copy.
inline Shape perturb_shape(const Shape& truth, double min_iou, Rng& rng) {
  if (truth.kind != ShapeKind::Box)
    throw std::invalid_argument("approximate-truth perturbation supports boxes only");
  if (!(min_iou > 0.0 && min_iou <= 1.0))
    throw std::invalid_argument("min_iou must lie in (0, 1]");
  if (min_iou == 1.0) return truth;
  const Box& b = truth.box;
  const double reach = 0.5 * std::min(b.width(), b.height());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double magnitude = uniform_real(rng, 0.0, reach);
    const auto [dx, dy] = detail::dislocation(rng, magnitude);
    Shape moved = truth;
    moved.box = Box{b.x0 + dx, b.y0 + dy, b.x1 + dx, b.y1 + dy};
    if (1.0 - iou_distance(truth, moved) >= min_iou) return moved;
  }
  throw std::runtime_error("could not reach the requested overlap");
}

inline ShapeSet perturb_to_approximate_truth(const ShapeSet& truth, double min_iou, Rng& rng) {
  ShapeSet out;
  out.id = truth.id;
  out.shapes.reserve(truth.size());
  for (const Shape& s : truth.shapes) out.shapes.push_back(perturb_shape(s, min_iou, rng));
  return out;
}

inline TrackSet perturb_to_approximate_truth(const TrackSet& truth, double min_iou, Rng& rng) {
  TrackSet out;
  out.t_begin = truth.t_begin;
  out.t_end = truth.t_end;
  for (const Track& tr : truth.tracks) {
    Track p;
    p.label = tr.label;
    for (const auto& [t, s] : tr.states) p.states.emplace(t, perturb_shape(s, min_iou, rng));
    out.tracks.push_back(std::move(p));
  }
  return out;
}

// Cardinality/offset sweep: level k holds 2^k equal squares on a sparse
// grid, and the prediction shifts every square left by 2^(-k/2). The offset
// shrinks while the object count grows, so normalized distances must fall
// with k and the un-normalized per-object sum must rise.
struct ScaleSweepCase {
  int level = 0;
  std::int64_t objects = 0;
  double shift = 0.0;
  double object_size = 0.0;
  ShapeSet reference;
  ShapeSet prediction;
};

inline ScaleSweepCase scale_sweep_case(int level, double object_size = 10.0,
                                       double spacing = 40.0) {
  if (level < 1 || level > 20) throw std::invalid_argument("level must lie in 1..20");
  if (!(spacing > object_size)) throw std::invalid_argument("grid spacing must exceed object size");
  ScaleSweepCase c;
  c.level = level;
  c.objects = std::int64_t{1} << level;
  c.shift = std::pow(2.0, -0.5 * level);
  c.object_size = object_size;
  const auto columns = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(c.objects))));
  for (std::int64_t i = 0; i < c.objects; ++i) {
    const double x = static_cast<double>(i % columns) * spacing;
    const double y = static_cast<double>(i / columns) * spacing;
    c.reference.shapes.push_back(Shape::make_box(x, y, x + object_size, y + object_size));
    c.prediction.shapes.push_back(
        Shape::make_box(x - c.shift, y, x + object_size - c.shift, y + object_size));
  }
  return c;
}

}  // namespace shapeval
