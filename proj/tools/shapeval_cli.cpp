// Command-line front end: evaluates detection/segmentation/tracking files
// against a reference, runs the Monte Carlo ranking experiments, and writes
// deterministic JSON/CSV reports.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapeval/shapeval.hpp"

namespace sv = shapeval;

namespace {

sv::BaseDistance parse_base(const std::string& s) {
  if (s == "iou") return sv::BaseDistance::Iou;
  if (s == "giou") return sv::BaseDistance::Giou;
  throw std::invalid_argument("base must be 'iou' or 'giou'");
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t b = tok.find_first_not_of(" \t");
    std::size_t e = tok.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(tok.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> effective_grid(const std::string& csv, sv::BaseDistance base) {
  if (csv.empty()) return sv::default_threshold_grid(base);
  std::vector<double> out;
  for (const auto& tok : split_list(csv)) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("threshold list entry '" + tok + "' is not a number");
    }
  }
  if (out.empty()) throw std::invalid_argument("threshold list is empty");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1]))
      throw std::invalid_argument("thresholds must be strictly increasing");
  return out;
}

std::string join_list(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += xs[i];
  }
  return out;
}

std::string join_grid(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += sv::format_double(xs[i]);
  }
  return out;
}

// Unique display name per prediction file (file stem, deduplicated).
std::vector<std::string> prediction_names(const std::vector<std::string>& paths) {
  std::vector<std::string> names;
  std::map<std::string, int> used;
  for (const auto& p : paths) {
    std::string stem = std::filesystem::path(p).stem().string();
    if (stem.empty()) stem = "prediction";
    int n = ++used[stem];
    names.push_back(n == 1 ? stem : stem + "#" + std::to_string(n));
  }
  return names;
}

void emit_report_outputs(const std::string& json_body, const std::string& out_json,
                         const std::vector<std::pair<std::string, std::string>>& csv_outputs) {
  bool wrote = false;
  if (!out_json.empty()) {
    sv::write_text_file(out_json, json_body + "\n");
    wrote = true;
  }
  for (const auto& [path, body] : csv_outputs)
    if (!path.empty()) {
      sv::write_text_file(path, body);
      wrote = true;
    }
  if (!wrote) std::cout << json_body << "\n";
}

// ---------------------------------------------------------------------------
// eval-detect / eval-track

struct EvalDetectArgs {
  std::string ref_path;
  std::vector<std::string> pred_paths;
  std::string task = "detect";  // detect | segment
  std::string base = "iou";
  std::string thresholds;
  std::string criteria;
  bool multi_class = false;
  std::string assign = "optimal";
  std::string interp = "all-point";
  int grid_points = 101;
  std::uint64_t seed = 1;
  std::string out_json, out_scores, out_ranks, out_correlation;
};

std::vector<std::string> detection_criteria_or_default(const std::string& csv, bool multi_class,
                                                       const std::string& assign) {
  std::vector<std::string> names = split_list(csv);
  if (names.empty()) {
    names = {"f1", "hausdorff", "emd", "ospa", "ospa-cut"};
    if (multi_class) {
      names.insert(names.begin() + 1, assign == "greedy" ? "map-greedy" : "map");
      names.insert(names.begin() + 2, "log-amr");
    }
  }
  const auto catalog = sv::detection_criterion_catalog();
  for (const auto& n : names) {
    auto info = sv::criterion_info(catalog, n);
    if (info.needs_classes && !multi_class)
      throw std::invalid_argument("criterion '" + n +
                                  "' needs class labels; pass --multi-class with labelled data");
  }
  return names;
}

std::vector<std::string> tracking_criteria_or_default(const std::string& csv) {
  std::vector<std::string> names = split_list(csv);
  if (names.empty()) names = {"mota", "idf1", "hota", "hausdorff", "emd", "ospa2", "ospa2-cut"};
  const auto catalog = sv::tracking_criterion_catalog();
  for (const auto& n : names) sv::criterion_info(catalog, n);
  return names;
}

sv::Interp parse_interp(const std::string& s) {
  if (s == "all-point") return sv::Interp::AllPoint;
  if (s == "grid") return sv::Interp::Grid;
  throw std::invalid_argument("interpolation must be 'all-point' or 'grid'");
}

void reconcile_detection_counts(const sv::DetectionFile& f, const std::string& what) {
  std::size_t total = 0;
  for (const auto& [id, set] : f.images) total += set.shapes.size();
  if (total != f.record_count)
    throw std::logic_error(what + ": loaded shape count does not match record count");
}

int run_eval_detect(const EvalDetectArgs& a) {
  const sv::BaseDistance base = parse_base(a.base);
  if (a.task != "detect" && a.task != "segment")
    throw std::invalid_argument("task must be 'detect' or 'segment'");
  const sv::ShapePayload payload =
      a.task == "segment" ? sv::ShapePayload::Mask : sv::ShapePayload::Box;
  if (a.assign != "optimal" && a.assign != "greedy")
    throw std::invalid_argument("assignment mode must be 'optimal' or 'greedy'");
  const sv::Interp interp = parse_interp(a.interp);
  if (a.grid_points < 2) throw std::invalid_argument("grid-points must be at least 2");
  if (a.pred_paths.empty()) throw std::invalid_argument("at least one --pred file is required");

  const std::vector<double> grid = effective_grid(a.thresholds, base);
  const std::vector<std::string> names =
      detection_criteria_or_default(a.criteria, a.multi_class, a.assign);
  const auto catalog = sv::detection_criterion_catalog();

  sv::DetectionFile ref = sv::load_detections(a.ref_path, payload);
  reconcile_detection_counts(ref, a.ref_path);

  sv::EvalReport report;
  report.task = a.task;
  report.base = a.base;
  report.thresholds = grid;
  report.algorithms = prediction_names(a.pred_paths);
  report.record_counts.emplace_back("reference", ref.record_count);

  for (const std::string& name : names) {
    sv::EvalCriterion c;
    c.name = name;
    auto info = sv::criterion_info(catalog, name);
    c.thresholded = info.thresholded;
    c.higher_better = info.higher_better;
    report.criteria.push_back(std::move(c));
  }

  const auto point_value = [&](const sv::ShapeSet& r, const sv::ShapeSet& p,
                               const std::string& name, double t) {
    if (name == "map")
      return sv::mean_ap(r, p, t, base, sv::AssignMode::Optimal, interp, a.grid_points);
    if (name == "map-greedy")
      return sv::mean_ap(r, p, t, base, sv::AssignMode::Greedy, interp, a.grid_points);
    return sv::detection_criterion_value(r, p, name, t, base, a.multi_class);
  };

  for (std::size_t pi = 0; pi < a.pred_paths.size(); ++pi) {
    sv::DetectionFile pred = sv::load_detections(a.pred_paths[pi], payload);
    reconcile_detection_counts(pred, a.pred_paths[pi]);
    report.record_counts.emplace_back(report.algorithms[pi], pred.record_count);

    std::set<std::int64_t> ids;
    for (const auto& [id, s] : ref.images) ids.insert(id);
    for (const auto& [id, s] : pred.images) ids.insert(id);
    if (ids.empty()) ids.insert(0);  // two empty files: one empty-vs-empty image
    const sv::ShapeSet empty_set;

    for (std::size_t ci = 0; ci < names.size(); ++ci) {
      auto& c = report.criteria[ci];
      const std::size_t cols = c.thresholded ? grid.size() : 1;
      std::vector<double> row(cols, 0.0);
      for (std::int64_t id : ids) {
        auto rit = ref.images.find(id);
        auto pit = pred.images.find(id);
        const sv::ShapeSet& r = rit == ref.images.end() ? empty_set : rit->second;
        const sv::ShapeSet& p = pit == pred.images.end() ? empty_set : pit->second;
        for (std::size_t col = 0; col < cols; ++col)
          row[col] += point_value(r, p, names[ci], c.thresholded ? grid[col] : 0.0);
      }
      for (double& v : row) v /= static_cast<double>(ids.size());
      c.scores.push_back(std::move(row));
    }
  }

  std::vector<std::pair<std::string, std::string>> config = {
      {"task", a.task},
      {"base", a.base},
      {"thresholds", join_grid(grid)},
      {"criteria", join_list(names)},
      {"assign", a.assign},
      {"interp", a.interp},
      {"grid-points", std::to_string(a.grid_points)},
      {"multi-class", a.multi_class ? "true" : "false"},
      {"ref", a.ref_path},
      {"pred", join_list(a.pred_paths)},
  };
  report.meta = sv::make_metadata("eval-detect", a.seed, std::move(config));

  emit_report_outputs(sv::eval_report_json(report), a.out_json,
                      {{a.out_scores, sv::eval_scores_csv(report)},
                       {a.out_ranks, sv::eval_ranks_csv(report)},
                       {a.out_correlation, sv::eval_rank_correlation_csv(report)}});
  return 0;
}

struct EvalTrackArgs {
  std::string ref_path;
  std::vector<std::string> pred_paths;
  std::string base = "iou";
  std::string thresholds;
  std::string criteria;
  std::uint64_t seed = 1;
  std::string out_json, out_scores, out_ranks, out_correlation;
};

int run_eval_track(const EvalTrackArgs& a) {
  const sv::BaseDistance base = parse_base(a.base);
  if (a.pred_paths.empty()) throw std::invalid_argument("at least one --pred file is required");
  const std::vector<double> grid = effective_grid(a.thresholds, base);
  const std::vector<std::string> names = tracking_criteria_or_default(a.criteria);
  const auto catalog = sv::tracking_criterion_catalog();

  sv::TrackFile ref = sv::load_tracks(a.ref_path);

  sv::EvalReport report;
  report.task = "track";
  report.base = a.base;
  report.thresholds = grid;
  report.algorithms = prediction_names(a.pred_paths);
  report.record_counts.emplace_back("reference", ref.record_count);

  for (const std::string& name : names) {
    sv::EvalCriterion c;
    c.name = name;
    auto info = sv::criterion_info(catalog, name);
    c.thresholded = info.thresholded;
    c.higher_better = info.higher_better;
    report.criteria.push_back(std::move(c));
  }

  for (std::size_t pi = 0; pi < a.pred_paths.size(); ++pi) {
    sv::TrackFile pred = sv::load_tracks(a.pred_paths[pi]);
    report.record_counts.emplace_back(report.algorithms[pi], pred.record_count);
    sv::TrackSet r = ref.tracks;
    sv::TrackSet p = pred.tracks;
    sv::unify_windows(r, p);
    for (std::size_t ci = 0; ci < names.size(); ++ci) {
      auto& c = report.criteria[ci];
      const std::size_t cols = c.thresholded ? grid.size() : 1;
      std::vector<double> row(cols, 0.0);
      for (std::size_t col = 0; col < cols; ++col)
        row[col] =
            sv::tracking_criterion_value(r, p, names[ci], c.thresholded ? grid[col] : 0.0, base);
      c.scores.push_back(std::move(row));
    }
  }

  std::vector<std::pair<std::string, std::string>> config = {
      {"task", "track"},
      {"base", a.base},
      {"thresholds", join_grid(grid)},
      {"criteria", join_list(names)},
      {"ref", a.ref_path},
      {"pred", join_list(a.pred_paths)},
  };
  report.meta = sv::make_metadata("eval-track", a.seed, std::move(config));

  emit_report_outputs(sv::eval_report_json(report), a.out_json,
                      {{a.out_scores, sv::eval_scores_csv(report)},
                       {a.out_ranks, sv::eval_ranks_csv(report)},
                       {a.out_correlation, sv::eval_rank_correlation_csv(report)}});
  return 0;
}

// ---------------------------------------------------------------------------
// sanity / consistency

struct ExperimentArgs {
  std::string task;  // detect-single | detect-multi | track
  int trials = 100;
  std::uint64_t seed = 1;
  int algorithms = 20;
  int classes = 5;
  std::string base = "iou";
  std::string thresholds;
  std::string criteria;
  double min_iou = 0.9;  // consistency only
  std::string out_json, out_errors, out_reliability, out_csv;
  std::string dump_dir;
};

std::vector<std::string> experiment_criteria(const ExperimentArgs& a) {
  std::vector<std::string> names = split_list(a.criteria);
  if (names.empty()) {
    if (a.task == "detect-single")
      names = {"f1", "hausdorff", "emd", "ospa", "ospa-cut"};
    else if (a.task == "detect-multi")
      names = {"map", "log-amr", "hausdorff", "emd", "ospa", "ospa-cut"};
    else
      names = {"mota", "idf1", "hota", "hausdorff", "emd", "ospa2", "ospa2-cut"};
  }
  const bool track = a.task == "track";
  const auto catalog =
      track ? sv::tracking_criterion_catalog() : sv::detection_criterion_catalog();
  for (const auto& n : names) {
    auto info = sv::criterion_info(catalog, n);
    if (!track && info.needs_classes && a.task != "detect-multi")
      throw std::invalid_argument("criterion '" + n + "' needs the detect-multi task");
  }
  return names;
}

void require_experiment_task(const std::string& task) {
  if (task != "detect-single" && task != "detect-multi" && task != "track")
    throw std::invalid_argument("task must be detect-single, detect-multi, or track");
}

sv::DetectionSanityConfig detection_config(const ExperimentArgs& a) {
  sv::DetectionSanityConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.algorithms = a.algorithms;
  cfg.multi_class = a.task == "detect-multi";
  cfg.classes = a.classes;
  return cfg;
}

sv::TrackingSanityConfig tracking_config(const ExperimentArgs& a) {
  sv::TrackingSanityConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.algorithms = a.algorithms;
  return cfg;
}

void dump_detection_scenario(const std::string& dir, const sv::DetectionScenario& sc) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  sv::save_detections((fs::path(dir) / "reference.json").string(), sc.reference);
  std::vector<std::string> files;
  for (std::size_t i = 0; i < sc.predictions.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "algorithm_%02zu.json", i + 1);
    files.emplace_back(buf);
    sv::save_detections((fs::path(dir) / buf).string(), sc.predictions[i]);
  }
  sv::JsonWriter w;
  w.begin_object();
  w.kv("type", "detection");
  w.kv("objects", sc.objects);
  w.key("true_ranks");
  w.begin_array();
  for (int r : sc.true_ranks) w.value(r);
  w.end_array();
  w.key("p_detect");
  sv::detail::write_double_array(w, sc.p_detect);
  w.key("p_class");
  sv::detail::write_double_array(w, sc.p_class);
  w.key("f_state");
  sv::detail::write_double_array(w, sc.f_state);
  w.key("f_random");
  w.begin_array();
  for (int v : sc.f_random) w.value(v);
  w.end_array();
  w.kv("reference_file", "reference.json");
  w.key("prediction_files");
  w.begin_array();
  for (const auto& f : files) w.value(f);
  w.end_array();
  w.end_object();
  sv::write_text_file((fs::path(dir) / "scenario.json").string(), w.str() + "\n");
}

void dump_tracking_scenario(const std::string& dir, const sv::TrackingScenario& sc) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  sv::save_tracks((fs::path(dir) / "reference.csv").string(), sc.reference);
  std::vector<std::string> files;
  for (std::size_t i = 0; i < sc.predictions.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "algorithm_%02zu.csv", i + 1);
    files.emplace_back(buf);
    sv::save_tracks((fs::path(dir) / buf).string(), sc.predictions[i]);
  }
  sv::JsonWriter w;
  w.begin_object();
  w.kv("type", "tracking");
  w.kv("tracks", sc.tracks);
  w.kv("window_begin", sc.reference.t_begin);
  w.kv("window_end", sc.reference.t_end);
  w.key("true_ranks");
  w.begin_array();
  for (int r : sc.true_ranks) w.value(r);
  w.end_array();
  w.key("p_fragment");
  sv::detail::write_double_array(w, sc.p_fragment);
  w.key("p_state_false");
  sv::detail::write_double_array(w, sc.p_state_false);
  w.key("p_id_swap");
  sv::detail::write_double_array(w, sc.p_id_swap);
  w.key("n_random_false");
  w.begin_array();
  for (int v : sc.n_random_false) w.value(v);
  w.end_array();
  w.kv("reference_file", "reference.csv");
  w.key("prediction_files");
  w.begin_array();
  for (const auto& f : files) w.value(f);
  w.end_array();
  w.end_object();
  sv::write_text_file((fs::path(dir) / "scenario.json").string(), w.str() + "\n");
}

std::vector<std::pair<std::string, std::string>> experiment_config(
    const ExperimentArgs& a, const std::vector<double>& grid,
    const std::vector<std::string>& names, bool with_min_iou) {
  std::vector<std::pair<std::string, std::string>> config = {
      {"task", a.task},
      {"base", a.base},
      {"thresholds", join_grid(grid)},
      {"criteria", join_list(names)},
      {"trials", std::to_string(a.trials)},
      {"algorithms", std::to_string(a.algorithms)},
  };
  if (a.task == "detect-multi") config.emplace_back("classes", std::to_string(a.classes));
  if (with_min_iou) config.emplace_back("min-iou", sv::format_double(a.min_iou));
  return config;
}

int run_sanity_cmd(const ExperimentArgs& a) {
  require_experiment_task(a.task);
  const sv::BaseDistance base = parse_base(a.base);
  const std::vector<double> grid = effective_grid(a.thresholds, base);
  const std::vector<std::string> names = experiment_criteria(a);

  sv::SanityOutcome outcome;
  if (a.task == "track") {
    auto cfg = tracking_config(a);
    outcome = sv::run_tracking_sanity(cfg, names, grid, base);
    if (!a.dump_dir.empty()) {
      sv::Rng rng(sv::mix_seed(cfg.seed, 0));
      dump_tracking_scenario(a.dump_dir, sv::gen_tracking_scenario(cfg, rng));
    }
  } else {
    auto cfg = detection_config(a);
    outcome = sv::run_detection_sanity(cfg, names, grid, base);
    if (!a.dump_dir.empty()) {
      sv::Rng rng(sv::mix_seed(cfg.seed, 0));
      dump_detection_scenario(a.dump_dir, sv::gen_detection_scenario(cfg, rng));
    }
  }

  auto meta = sv::make_metadata("sanity", a.seed, experiment_config(a, grid, names, false));
  emit_report_outputs(sv::sanity_json(outcome, meta), a.out_json,
                      {{a.out_errors, sv::sanity_errors_csv(outcome)},
                       {a.out_reliability, sv::sanity_reliability_csv(outcome)}});
  return 0;
}

int run_consistency_cmd(const ExperimentArgs& a) {
  require_experiment_task(a.task);
  const sv::BaseDistance base = parse_base(a.base);
  const std::vector<double> grid = effective_grid(a.thresholds, base);
  const std::vector<std::string> names = experiment_criteria(a);
  if (!(a.min_iou > 0.0 && a.min_iou <= 1.0))
    throw std::invalid_argument("min-iou must be in (0, 1]");

  sv::ConsistencyOutcome outcome;
  if (a.task == "track")
    outcome = sv::run_tracking_consistency(tracking_config(a), names, grid, base, a.min_iou);
  else
    outcome = sv::run_detection_consistency(detection_config(a), names, grid, base, a.min_iou);

  auto meta = sv::make_metadata("consistency", a.seed, experiment_config(a, grid, names, true));
  emit_report_outputs(sv::consistency_json(outcome, meta), a.out_json,
                      {{a.out_csv, sv::consistency_csv(outcome)}});
  return 0;
}

// ---------------------------------------------------------------------------
// scale-sweep

struct ScaleSweepArgs {
  int max_level = 10;
  double threshold = 0.5;
  std::string out_json, out_csv;
};

int run_scale_sweep_cmd(const ScaleSweepArgs& a) {
  auto rows = sv::run_scale_sweep(a.max_level, a.threshold);
  auto meta = sv::make_metadata("scale-sweep", 0,
                                {{"max-level", std::to_string(a.max_level)},
                                 {"threshold", sv::format_double(a.threshold)}});
  emit_report_outputs(sv::scale_sweep_json(rows, meta), a.out_json,
                      {{a.out_csv, sv::scale_sweep_csv(rows)}});
  return 0;
}

// ---------------------------------------------------------------------------
// report: re-render an evaluation report JSON as tidy plotting series.

struct ReportArgs {
  std::string in_path;
  std::string out_csv;
};

int run_report_cmd(const ReportArgs& a) {
  std::ifstream in(a.in_path);
  if (!in) throw std::runtime_error("cannot open " + a.in_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error(a.in_path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("criteria") || !doc.contains("algorithms"))
    throw std::runtime_error(a.in_path + ": not an evaluation report (missing criteria)");
  const auto& algorithms = doc["algorithms"];
  const auto& thresholds = doc["thresholds"];

  std::string out = "criterion,threshold,algorithm,score,rank\n";
  for (const auto& c : doc["criteria"]) {
    const std::string name = c.at("name").get<std::string>();
    const bool thresholded = c.at("thresholded").get<bool>();
    const auto& scores = c.at("scores");
    const auto& ranks = c.at("ranks");
    const std::size_t cols = thresholded ? thresholds.size() : 1;
    for (std::size_t col = 0; col < cols; ++col)
      for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
        out += name;
        out += ',';
        if (thresholded) out += sv::format_double(thresholds[col].get<double>());
        out += ',';
        out += algorithms[ai].get<std::string>();
        out += ',';
        out += sv::format_double(scores[ai][col].get<double>());
        out += ',';
        out += std::to_string(ranks[col][ai].get<int>());
        out += '\n';
      }
  }
  if (a.out_csv.empty())
    std::cout << out;
  else
    sv::write_text_file(a.out_csv, out);
  return 0;
}

void add_seed_option(CLI::App* sub, std::uint64_t& seed) {
  sub->add_option("--seed", seed, "random seed (env SHAPEVAL_SEED)")
      ->envname("SHAPEVAL_SEED")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape-set evaluation: set metrics, classic criteria, and ranking experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sv::kLibraryName) + " " + sv::kVersion);

  EvalDetectArgs ed;
  CLI::App* eval_detect =
      app.add_subcommand("eval-detect", "score prediction files against a reference (boxes or masks)");
  eval_detect->set_config("--config", "", "flat key=value config file");
  eval_detect->add_option("--ref", ed.ref_path, "reference annotations (JSON)")->required();
  eval_detect->add_option("--pred", ed.pred_paths, "prediction file (repeatable)")->required();
  eval_detect->add_option("--task", ed.task, "detect | segment")->capture_default_str();
  eval_detect->add_option("--base", ed.base, "base distance: iou | giou")->capture_default_str();
  eval_detect->add_option("--thresholds", ed.thresholds,
                          "comma-separated strictly increasing grid (default: standard grid)");
  eval_detect->add_option("--criteria", ed.criteria, "comma-separated criterion names");
  eval_detect->add_flag("--multi-class", ed.multi_class,
                        "evaluate per category and average over reference categories");
  eval_detect->add_option("--assign", ed.assign, "default AP matching: optimal | greedy")
      ->capture_default_str();
  eval_detect->add_option("--interp", ed.interp,
                          "precision-recall interpolation: all-point | grid")
      ->capture_default_str();
  eval_detect->add_option("--grid-points", ed.grid_points,
                          "recall grid size for --interp grid")
      ->capture_default_str();
  add_seed_option(eval_detect, ed.seed);
  eval_detect->add_option("--out-json", ed.out_json, "write the report JSON here");
  eval_detect->add_option("--out-scores", ed.out_scores, "write the score table CSV here");
  eval_detect->add_option("--out-ranks", ed.out_ranks, "write the rank table CSV here");
  eval_detect->add_option("--out-correlation", ed.out_correlation,
                          "write the criterion rank-correlation CSV here");
  eval_detect->callback([&ed] { run_eval_detect(ed); });

  EvalTrackArgs et;
  CLI::App* eval_track =
      app.add_subcommand("eval-track", "score track files against a reference");
  eval_track->set_config("--config", "", "flat key=value config file");
  eval_track->add_option("--ref", et.ref_path, "reference tracks (CSV)")->required();
  eval_track->add_option("--pred", et.pred_paths, "prediction file (repeatable)")->required();
  eval_track->add_option("--base", et.base, "base distance: iou | giou")->capture_default_str();
  eval_track->add_option("--thresholds", et.thresholds,
                         "comma-separated strictly increasing grid (default: standard grid)");
  eval_track->add_option("--criteria", et.criteria, "comma-separated criterion names");
  add_seed_option(eval_track, et.seed);
  eval_track->add_option("--out-json", et.out_json, "write the report JSON here");
  eval_track->add_option("--out-scores", et.out_scores, "write the score table CSV here");
  eval_track->add_option("--out-ranks", et.out_ranks, "write the rank table CSV here");
  eval_track->add_option("--out-correlation", et.out_correlation,
                         "write the criterion rank-correlation CSV here");
  eval_track->callback([&et] { run_eval_track(et); });

  ExperimentArgs sa;
  CLI::App* sanity = app.add_subcommand(
      "sanity", "Monte Carlo ranking-reliability experiment on generated scenarios");
  sanity->set_config("--config", "", "flat key=value config file");
  sanity->add_option("--task", sa.task, "detect-single | detect-multi | track")->required();
  sanity->add_option("--trials", sa.trials, "Monte Carlo trials")->capture_default_str();
  add_seed_option(sanity, sa.seed);
  sanity->add_option("--algorithms", sa.algorithms, "simulated algorithms (even, >= 2)")
      ->capture_default_str();
  sanity->add_option("--classes", sa.classes, "category count for detect-multi")
      ->capture_default_str();
  sanity->add_option("--base", sa.base, "base distance: iou | giou")->capture_default_str();
  sanity->add_option("--thresholds", sa.thresholds,
                     "comma-separated strictly increasing grid (default: standard grid)");
  sanity->add_option("--criteria", sa.criteria, "comma-separated criterion names");
  sanity->add_option("--out-json", sa.out_json, "write the outcome JSON here");
  sanity->add_option("--out-errors", sa.out_errors, "write the per-threshold error CSV here");
  sanity->add_option("--out-reliability", sa.out_reliability,
                     "write the reliability indicator CSV here");
  sanity->add_option("--dump-dir", sa.dump_dir,
                     "also write the first generated scenario (reference, predictions, "
                     "scenario.json) into this directory");
  sanity->callback([&sa] { run_sanity_cmd(sa); });

  ExperimentArgs ca;
  CLI::App* consistency = app.add_subcommand(
      "consistency", "paired ranking error with exact versus approximate reference");
  consistency->set_config("--config", "", "flat key=value config file");
  consistency->add_option("--task", ca.task, "detect-single | detect-multi | track")->required();
  consistency->add_option("--trials", ca.trials, "Monte Carlo trials")->capture_default_str();
  add_seed_option(consistency, ca.seed);
  consistency->add_option("--algorithms", ca.algorithms, "simulated algorithms (even, >= 2)")
      ->capture_default_str();
  consistency->add_option("--classes", ca.classes, "category count for detect-multi")
      ->capture_default_str();
  consistency->add_option("--min-iou", ca.min_iou,
                          "overlap each perturbed reference shape must keep")
      ->capture_default_str();
  consistency->add_option("--base", ca.base, "base distance: iou | giou")->capture_default_str();
  consistency->add_option("--thresholds", ca.thresholds,
                          "comma-separated strictly increasing grid (default: standard grid)");
  consistency->add_option("--criteria", ca.criteria, "comma-separated criterion names");
  consistency->add_option("--out-json", ca.out_json, "write the outcome JSON here");
  consistency->add_option("--out-csv", ca.out_csv, "write the paired-error CSV here");
  consistency->callback([&ca] { run_consistency_cmd(ca); });

  ScaleSweepArgs sw;
  CLI::App* sweep = app.add_subcommand(
      "scale-sweep", "closed-form doubling scenario: normalized versus total distances");
  sweep->set_config("--config", "", "flat key=value config file");
  sweep->add_option("--max-level", sw.max_level, "doubling levels (objects = 2^level)")
      ->capture_default_str();
  sweep->add_option("--threshold", sw.threshold, "match threshold for the classic criterion")
      ->capture_default_str();
  sweep->add_option("--out-json", sw.out_json, "write the table JSON here");
  sweep->add_option("--out-csv", sw.out_csv, "write the table CSV here");
  sweep->callback([&sw] { run_scale_sweep_cmd(sw); });

  ReportArgs ra;
  CLI::App* report = app.add_subcommand(
      "report", "render an evaluation report JSON as tidy score/rank series CSV");
  report->add_option("--in", ra.in_path, "evaluation report JSON")->required();
  report->add_option("--out", ra.out_csv, "CSV output path (default: stdout)");
  report->callback([&ra] { run_report_cmd(ra); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
