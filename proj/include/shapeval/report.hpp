#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shapeval/experiments.hpp"
#include "shapeval/json_out.hpp"
#include "shapeval/ranking.hpp"
#include "shapeval/version.hpp"

namespace shapeval {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Reproducibility header carried by every report: tool identity, the
// subcommand, the seed, and the effective configuration with a hash over its
// canonical key=value rendering. Deliberately no timestamps or host state.
struct RunMetadata {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // sorted by key
  std::string config_hash;
};

inline RunMetadata make_metadata(std::string command, std::uint64_t seed,
                                 std::vector<std::pair<std::string, std::string>> config) {
  RunMetadata meta;
  meta.command = std::move(command);
  meta.seed = seed;
  std::sort(config.begin(), config.end());
  std::string canonical;
  for (const auto& [k, v] : config) {
    canonical += k;
    canonical += '=';
    canonical += v;
    canonical += '\n';
  }
  meta.config = std::move(config);
  meta.config_hash = hex64(fnv1a(canonical));
  return meta;
}

namespace detail {

inline void write_metadata(JsonWriter& w, const RunMetadata& meta) {
  w.key("metadata");
  w.begin_object();
  w.kv("tool", kLibraryName);
  w.kv("version", kVersion);
  w.kv("command", meta.command);
  w.kv("seed", meta.seed);
  w.kv("config_hash", meta.config_hash);
  w.key("config");
  w.begin_object();
  for (const auto& [k, v] : meta.config) w.kv(k, v);
  w.end_object();
  w.end_object();
}

inline void write_double_array(JsonWriter& w, const std::vector<double>& xs) {
  w.begin_array();
  for (double x : xs) w.value(x);
  w.end_array();
}

inline void write_stats_arrays(JsonWriter& w, const char* prefix,
                               const std::vector<Stats>& stats) {
  w.key(std::string(prefix) + "_mean");
  w.begin_array();
  for (const auto& s : stats) w.value(s.mean);
  w.end_array();
  w.key(std::string(prefix) + "_std");
  w.begin_array();
  for (const auto& s : stats) w.value(s.stddev);
  w.end_array();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pairwise evaluation report: per-criterion scores for each prediction set
// against one reference, plus rank columns and criterion-to-criterion rank
// correlations when several prediction sets are compared.

struct EvalCriterion {
  std::string name;
  bool thresholded = false;
  bool higher_better = false;
  std::vector<std::vector<double>> scores;  // [algorithm][column]
};

struct EvalReport {
  RunMetadata meta;
  std::string task;  // "detect", "segment", or "track"
  std::string base;  // "iou" or "giou"
  std::vector<double> thresholds;
  std::vector<std::string> algorithms;
  std::vector<std::pair<std::string, std::size_t>> record_counts;  // input -> records read
  std::vector<EvalCriterion> criteria;
};

namespace detail {

inline std::size_t eval_columns(const EvalReport& r, const EvalCriterion& c) {
  return c.thresholded ? r.thresholds.size() : 1;
}

inline std::vector<int> eval_ranks_at(const EvalReport& r, const EvalCriterion& c,
                                      std::size_t col) {
  std::vector<double> column;
  column.reserve(r.algorithms.size());
  for (const auto& row : c.scores) column.push_back(row[col]);
  return ranks_from_scores(column, c.higher_better);
}

inline void require_eval_shape(const EvalReport& r) {
  for (const auto& c : r.criteria) {
    if (c.scores.size() != r.algorithms.size())
      throw std::logic_error("criterion " + c.name + ": one score row per algorithm required");
    for (const auto& row : c.scores)
      if (row.size() != eval_columns(r, c))
        throw std::logic_error("criterion " + c.name + ": wrong number of score columns");
  }
}

// C x C matrix of rank correlation coefficients (tau = 1 - 2 * normalized
// pairwise-disagreement distance, so identical rankings give 1 and reversed
// rankings give -1) at one grid column; parameter-free criteria contribute
// their single column everywhere.
inline std::vector<double> eval_correlation_at(const EvalReport& r, std::size_t col) {
  std::size_t n = r.criteria.size();
  std::vector<std::vector<int>> ranks(n);
  for (std::size_t i = 0; i < n; ++i)
    ranks[i] = eval_ranks_at(r, r.criteria[i], r.criteria[i].thresholded ? col : 0);
  std::vector<double> m(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      m[i * n + j] = m[j * n + i] = 1.0 - 2.0 * kendall_tau_normalized(ranks[i], ranks[j]);
  return m;
}

}  // namespace detail

inline std::string eval_report_json(const EvalReport& r) {
  detail::require_eval_shape(r);
  JsonWriter w;
  w.begin_object();
  detail::write_metadata(w, r.meta);
  w.kv("task", r.task);
  w.kv("base", r.base);
  w.key("algorithms");
  w.begin_array();
  for (const auto& name : r.algorithms) w.value(name);
  w.end_array();
  w.key("record_counts");
  w.begin_object();
  for (const auto& [name, count] : r.record_counts) w.kv(name, count);
  w.end_object();
  w.key("thresholds");
  detail::write_double_array(w, r.thresholds);
  w.key("criteria");
  w.begin_array();
  for (const auto& c : r.criteria) {
    w.begin_object();
    w.kv("name", c.name);
    w.kv("thresholded", c.thresholded);
    w.kv("higher_better", c.higher_better);
    w.key("scores");
    w.begin_array();
    for (const auto& row : c.scores) detail::write_double_array(w, row);
    w.end_array();
    w.key("ranks");
    w.begin_array();
    for (std::size_t col = 0; col < detail::eval_columns(r, c); ++col) {
      auto ranks = detail::eval_ranks_at(r, c, col);
      w.begin_array();
      for (int rk : ranks) w.value(rk);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  if (r.algorithms.size() >= 2 && r.criteria.size() >= 2 && !r.thresholds.empty()) {
    w.key("rank_correlation");
    w.begin_object();
    w.key("criteria");
    w.begin_array();
    for (const auto& c : r.criteria) w.value(c.name);
    w.end_array();
    std::size_t n = r.criteria.size();
    std::vector<double> mean(n * n, 0.0);
    w.key("per_threshold");
    w.begin_array();
    for (std::size_t col = 0; col < r.thresholds.size(); ++col) {
      auto m = detail::eval_correlation_at(r, col);
      for (std::size_t i = 0; i < m.size(); ++i) mean[i] += m[i];
      detail::write_double_array(w, m);
    }
    w.end_array();
    for (auto& v : mean) v /= static_cast<double>(r.thresholds.size());
    w.key("mean");
    detail::write_double_array(w, mean);
    w.end_object();
  }
  w.end_object();
  return w.str();
}

inline std::string eval_scores_csv(const EvalReport& r) {
  detail::require_eval_shape(r);
  std::string out = "criterion,algorithm,threshold,score\n";
  for (const auto& c : r.criteria)
    for (std::size_t a = 0; a < r.algorithms.size(); ++a)
      for (std::size_t col = 0; col < detail::eval_columns(r, c); ++col) {
        out += c.name;
        out += ',';
        out += r.algorithms[a];
        out += ',';
        if (c.thresholded) out += format_double(r.thresholds[col]);
        out += ',';
        out += format_double(c.scores[a][col]);
        out += '\n';
      }
  return out;
}

inline std::string eval_ranks_csv(const EvalReport& r) {
  detail::require_eval_shape(r);
  std::string out = "criterion,threshold,algorithm,rank\n";
  for (const auto& c : r.criteria)
    for (std::size_t col = 0; col < detail::eval_columns(r, c); ++col) {
      auto ranks = detail::eval_ranks_at(r, c, col);
      for (std::size_t a = 0; a < r.algorithms.size(); ++a) {
        out += c.name;
        out += ',';
        if (c.thresholded) out += format_double(r.thresholds[col]);
        out += ',';
        out += r.algorithms[a];
        out += ',';
        out += std::to_string(ranks[a]);
        out += '\n';
      }
    }
  return out;
}

// Mean-over-grid rank correlation between criteria (needs >= 2 algorithms).
inline std::string eval_rank_correlation_csv(const EvalReport& r) {
  detail::require_eval_shape(r);
  std::string out = "criterion_a,criterion_b,mean_rank_correlation\n";
  if (r.algorithms.size() < 2 || r.thresholds.empty()) return out;
  std::size_t n = r.criteria.size();
  std::vector<double> mean(n * n, 0.0);
  for (std::size_t col = 0; col < r.thresholds.size(); ++col) {
    auto m = detail::eval_correlation_at(r, col);
    for (std::size_t i = 0; i < m.size(); ++i) mean[i] += m[i];
  }
  for (auto& v : mean) v /= static_cast<double>(r.thresholds.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out += r.criteria[i].name;
      out += ',';
      out += r.criteria[j].name;
      out += ',';
      out += format_double(mean[i * n + j]);
      out += '\n';
    }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo ranking-reliability report.

inline std::string sanity_json(const SanityOutcome& o, const RunMetadata& meta) {
  JsonWriter w;
  w.begin_object();
  detail::write_metadata(w, meta);
  w.key("thresholds");
  detail::write_double_array(w, o.thresholds);
  w.kv("trials", static_cast<std::int64_t>(o.trials));
  w.kv("algorithms", o.algorithms);
  w.key("criteria");
  w.begin_array();
  for (const auto& c : o.criteria) {
    w.begin_object();
    w.kv("name", c.name);
    w.kv("thresholded", c.thresholded);
    w.kv("higher_better", c.higher_better);
    detail::write_stats_arrays(w, "error", c.error);
    if (c.has_m_partial) {
      w.kv("m_partial_mean", c.m_partial.mean);
      w.kv("m_partial_std", c.m_partial.stddev);
      w.kv("m_full_mean", c.m_full.mean);
      w.kv("m_full_std", c.m_full.stddev);
      w.kv("best_threshold", c.best_threshold);
    }
    w.kv("best_mean", c.best.mean);
    w.kv("best_std", c.best.stddev);
    w.kv("rank_switches_mean", c.rank_switches.mean);
    w.kv("rank_switches_std", c.rank_switches.stddev);
    w.kv("rank_distortion_mean", c.rank_distortion.mean);
    w.kv("rank_distortion_std", c.rank_distortion.stddev);
    w.kv("rank_sensitivity_mean", c.rank_sensitivity.mean);
    w.kv("rank_sensitivity_std", c.rank_sensitivity.stddev);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

inline std::string sanity_errors_csv(const SanityOutcome& o) {
  std::string out = "criterion,threshold,error_mean,error_std\n";
  for (const auto& c : o.criteria)
    for (std::size_t col = 0; col < c.error.size(); ++col) {
      out += c.name;
      out += ',';
      if (c.thresholded) out += format_double(o.thresholds[col]);
      out += ',';
      out += format_double(c.error[col].mean);
      out += ',';
      out += format_double(c.error[col].stddev);
      out += '\n';
    }
  return out;
}

inline std::string sanity_reliability_csv(const SanityOutcome& o) {
  std::string out =
      "criterion,rank_switches_mean,rank_switches_std,rank_distortion_mean,"
      "rank_distortion_std,rank_sensitivity_mean,rank_sensitivity_std,"
      "m_partial_mean,m_full_mean,best_threshold,best_mean\n";
  for (const auto& c : o.criteria) {
    out += c.name;
    out += ',';
    out += format_double(c.rank_switches.mean);
    out += ',';
    out += format_double(c.rank_switches.stddev);
    out += ',';
    out += format_double(c.rank_distortion.mean);
    out += ',';
    out += format_double(c.rank_distortion.stddev);
    out += ',';
    out += format_double(c.rank_sensitivity.mean);
    out += ',';
    out += format_double(c.rank_sensitivity.stddev);
    out += ',';
    if (c.has_m_partial) out += format_double(c.m_partial.mean);
    out += ',';
    if (c.has_m_partial) out += format_double(c.m_full.mean);
    out += ',';
    if (c.has_m_partial) out += format_double(c.best_threshold);
    out += ',';
    out += format_double(c.best.mean);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Approximate-truth consistency report.

inline std::string consistency_json(const ConsistencyOutcome& o, const RunMetadata& meta) {
  JsonWriter w;
  w.begin_object();
  detail::write_metadata(w, meta);
  w.key("thresholds");
  detail::write_double_array(w, o.thresholds);
  w.kv("trials", static_cast<std::int64_t>(o.trials));
  w.kv("min_iou", o.min_iou);
  w.kv("algorithms", o.algorithms);
  w.key("criteria");
  w.begin_array();
  for (const auto& c : o.criteria) {
    w.begin_object();
    w.kv("name", c.name);
    w.kv("thresholded", c.thresholded);
    w.kv("higher_better", c.higher_better);
    detail::write_stats_arrays(w, "truth_error", c.truth_error);
    detail::write_stats_arrays(w, "approx_error", c.approx_error);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

inline std::string consistency_csv(const ConsistencyOutcome& o) {
  std::string out =
      "criterion,threshold,truth_error_mean,truth_error_std,approx_error_mean,"
      "approx_error_std\n";
  for (const auto& c : o.criteria)
    for (std::size_t col = 0; col < c.truth_error.size(); ++col) {
      out += c.name;
      out += ',';
      if (c.thresholded) out += format_double(o.thresholds[col]);
      out += ',';
      out += format_double(c.truth_error[col].mean);
      out += ',';
      out += format_double(c.truth_error[col].stddev);
      out += ',';
      out += format_double(c.approx_error[col].mean);
      out += ',';
      out += format_double(c.approx_error[col].stddev);
      out += '\n';
    }
  return out;
}

// ---------------------------------------------------------------------------
// Doubling-sweep report.

inline std::string scale_sweep_json(const std::vector<ScaleSweepRow>& rows,
                                    const RunMetadata& meta) {
  JsonWriter w;
  w.begin_object();
  detail::write_metadata(w, meta);
  w.key("rows");
  w.begin_array();
  for (const auto& r : rows) {
    w.begin_object();
    w.kv("level", r.level);
    w.kv("objects", r.objects);
    w.kv("shift", r.shift);
    w.kv("per_object", r.per_object);
    w.kv("hausdorff", r.hausdorff);
    w.kv("emd", r.emd);
    w.kv("ospa", r.ospa);
    w.kv("ospa_unnormalized", r.ospa_unnormalized);
    w.kv("f1_dissimilarity", r.f1_dissimilarity);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

inline std::string scale_sweep_csv(const std::vector<ScaleSweepRow>& rows) {
  std::string out =
      "level,objects,shift,per_object,hausdorff,emd,ospa,ospa_unnormalized,"
      "f1_dissimilarity\n";
  for (const auto& r : rows) {
    out += std::to_string(r.level);
    out += ',';
    out += std::to_string(r.objects);
    out += ',';
    out += format_double(r.shift);
    out += ',';
    out += format_double(r.per_object);
    out += ',';
    out += format_double(r.hausdorff);
    out += ',';
    out += format_double(r.emd);
    out += ',';
    out += format_double(r.ospa);
    out += ',';
    out += format_double(r.ospa_unnormalized);
    out += ',';
    out += format_double(r.f1_dissimilarity);
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

}  // namespace shapeval
