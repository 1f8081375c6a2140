#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fishtrack/fishtrack.hpp"
#include "fishtrack/config.hpp"

namespace fishtrack::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

bool same_file(const std::string& a, const std::string& b) {
  std::error_code ec_a, ec_b;
  const auto ca = fs::weakly_canonical(a, ec_a);
  const auto cb = fs::weakly_canonical(b, ec_b);
  if (ec_a || ec_b) return a == b;
  return ca == cb;
}

void require_distinct(const std::string& input, const std::vector<std::string>& outputs) {
  for (const auto& o : outputs) {
    if (!o.empty() && same_file(input, o)) throw InvalidInput("output path '" + o + "' overwrites input '" + input + "'");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  return out;
}

// ---------------------------------------------------------------- track

struct TrackArgs {
  std::string detections;
  std::string out;
  std::string tracker = "bytetrack";
  double high_thresh = 0.25;
  double low_thresh = 0.1;
  double new_track_thresh = 0.25;
  double match_thresh = 0.8;
  int track_buffer = 30;
  bool fuse_score = false;
  CLI::Option* fuse_opt = nullptr;
};

int run_track(const TrackArgs& a, std::ostream& out) {
  require_distinct(a.detections, {a.out});
  const auto variant = parse_variant(a.tracker);
  TrackerConfig cfg = TrackerConfig::defaults(*variant);
  cfg.high_thresh = a.high_thresh;
  cfg.low_thresh = a.low_thresh;
  cfg.new_track_thresh = a.new_track_thresh;
  cfg.match_thresh = a.match_thresh;
  cfg.track_buffer = a.track_buffer;
  if (a.fuse_opt->count() > 0) cfg.fuse_score = a.fuse_score;
  cfg.validate();

  const auto dets = read_mot_file(a.detections, MotKind::detections);
  const auto tracks = run_sequence(dets, cfg);
  write_mot_file(a.out, tracks, MotKind::tracks);
  out << "tracked " << tracks.histories().size() << " identities, " << tracks.box_count() << " boxes -> " << a.out
      << '\n';
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string gt;
  std::string tracks;
  std::string detections;
  std::string json_report;
  std::string csv_report;
  double iou_gate = 0.5;
  bool verbose = false;
};

void check_lengths(const SequenceAnnotations& gt, const std::string& gt_path, const SequenceAnnotations& other,
                   const std::string& other_path) {
  if (other.frames.empty()) return;
  const int gt_last = gt.frames.empty() ? 0 : gt.frames.rbegin()->first + 1;
  const int other_last = other.frames.rbegin()->first + 1;
  if (other_last > gt_last) {
    throw InvalidInput("sequence length mismatch: '" + other_path + "' runs to frame " + std::to_string(other_last) +
                       " but '" + gt_path + "' ends at frame " + std::to_string(gt_last));
  }
}

Json tracking_json(const TrackingEvalResult& r, bool verbose) {
  Json j;
  j["idf1"] = r.idf1;
  j["mota"] = r.mota;
  j["hota"] = r.hota;
  j["deta"] = r.deta;
  j["assa"] = r.assa;
  j["idsw"] = r.idsw;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["gt_count"] = r.gt_count;
  if (verbose) {
    Json per = Json::object();
    for (const auto& [alpha, h] : r.per_alpha) per[alpha_key(alpha)] = {{"hota", h.hota}, {"deta", h.deta}, {"assa", h.assa}};
    j["per_alpha"] = per;
  }
  return j;
}

Json detection_json(const DetectionEvalResult& r) {
  Json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["map50"] = r.map50;
  j["map50_95"] = r.map50_95;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision_undefined"] = r.precision_undefined;
  j["recall_undefined"] = r.recall_undefined;
  Json ap = Json::object();
  for (const auto& [t, v] : r.ap_per_threshold) ap[alpha_key(t)] = v;
  j["ap_per_threshold"] = ap;
  return j;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  require_distinct(a.gt, {a.json_report, a.csv_report});
  require_distinct(a.tracks, {a.json_report, a.csv_report});
  if (!a.detections.empty()) require_distinct(a.detections, {a.json_report, a.csv_report});

  const auto gt = read_mot_file(a.gt, MotKind::ground_truth);
  const auto tracks = read_mot_file(a.tracks, MotKind::tracks);
  check_lengths(gt, a.gt, tracks, a.tracks);

  const auto tracking = evaluate_tracking(gt, tracks, a.iou_gate);
  Report report = make_tracking_report(tracking, a.verbose);
  Json json;
  json["tracking"] = tracking_json(tracking, a.verbose);

  if (!a.detections.empty()) {
    const auto dets = read_mot_file(a.detections, MotKind::detections);
    check_lengths(gt, a.gt, dets, a.detections);
    const auto det = compute_map(gt, dets);
    report.append(make_detection_report(det));
    json["detection"] = detection_json(det);
  }

  report.write_table(out);
  if (!a.csv_report.empty()) {
    auto f = open_output(a.csv_report);
    report.write_csv(f);
  }
  if (!a.json_report.empty()) {
    auto f = open_output(a.json_report);
    f << json.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- locomotion

struct LocomotionArgs {
  std::string tracks;
  std::string out;
  std::string magnitude_out;
  std::string svg;
  std::string magnitude_svg;
  LocomotionOptions options;
  int bins = 18;
  int magnitude_bins = 20;
  std::optional<double> max_magnitude;
};

int run_locomotion(const LocomotionArgs& a, std::ostream& out, std::ostream& err) {
  require_distinct(a.tracks, {a.out, a.magnitude_out, a.svg, a.magnitude_svg});
  a.options.validate();
  const auto tracks = read_mot_file(a.tracks, MotKind::tracks);
  const auto samples = sequence_directions(tracks, a.options);
  if (samples.empty()) {
    err << "warning: no track has " << a.options.min_track_len
        << " or more positions; histograms are empty\n";
  }

  const auto directions = direction_histogram(samples, a.bins);
  {
    auto f = open_output(a.out);
    write_histogram_csv(f, directions);
  }
  if (!a.svg.empty()) {
    auto f = open_output(a.svg);
    write_histogram_svg(f, directions, "Swimming direction", "angle (degrees)");
  }

  if (!a.magnitude_out.empty() || !a.magnitude_svg.empty()) {
    double max_mag = 1.0;
    if (a.max_magnitude) {
      max_mag = *a.max_magnitude;
    } else {
      for (const auto& s : samples) max_mag = std::max(max_mag, s.magnitude);
    }
    const auto magnitudes = magnitude_histogram(samples, a.magnitude_bins, max_mag);
    if (!a.magnitude_out.empty()) {
      auto f = open_output(a.magnitude_out);
      write_histogram_csv(f, magnitudes);
    }
    if (!a.magnitude_svg.empty()) {
      auto f = open_output(a.magnitude_svg);
      write_histogram_svg(f, magnitudes, "Swimming speed", "magnitude (pixels/frame)");
    }
    if (magnitudes.overflow > 0) err << "warning: " << magnitudes.overflow << " magnitudes clamped into the last bin\n";
  }
  out << samples.size() << " direction samples from " << tracks.histories().size() << " tracks\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::string out_gt;
  std::string out_dets;
  std::map<std::string, std::string> flag_values;  // key -> raw value from flags
  std::map<std::string, CLI::Option*> flag_options;
};

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
  T value{};
  const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size()) {
    throw InvalidInput("invalid value '" + raw + "' for '" + key + "'");
  }
  return value;
}

using Setter = std::function<void(const std::string&, const std::string&)>;

struct SimulationSetup {
  ShoalScenario scenario;
  CorruptionModel corruption;
  std::optional<std::uint64_t> corruption_seed;
};

std::vector<std::pair<std::string, Setter>> simulation_keys(SimulationSetup& s) {
  auto num = [](double& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_value<double>(k, v); };
  };
  auto integer = [](int& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_value<int>(k, v); };
  };
  auto& sc = s.scenario;
  auto& cm = s.corruption;
  return {
      {"seed", [&sc](const std::string& k, const std::string& v) { sc.seed = parse_value<std::uint64_t>(k, v); }},
      {"fish_count", integer(sc.fish_count)},
      {"frames", integer(sc.frames)},
      {"tank_width", integer(sc.tank_width)},
      {"tank_height", integer(sc.tank_height)},
      {"speed_min", num(sc.speed_min)},
      {"speed_max", num(sc.speed_max)},
      {"heading_noise_sigma", num(sc.heading_noise_sigma)},
      {"turn_probability", num(sc.turn_probability)},
      {"heading_spread", num(sc.heading_spread)},
      {"box_min", num(sc.box_min)},
      {"box_max", num(sc.box_max)},
      {"aspect_ratio", num(sc.aspect_ratio)},
      {"miss_rate", num(cm.miss_rate)},
      {"fp_rate_per_frame", num(cm.fp_rate_per_frame)},
      {"jitter_sigma", num(cm.jitter_sigma)},
      {"tp_score_mean", num(cm.tp_score_mean)},
      {"fp_score_mean", num(cm.fp_score_mean)},
      {"score_sigma", num(cm.score_sigma)},
      {"corruption_seed",
       [&s](const std::string& k, const std::string& v) { s.corruption_seed = parse_value<std::uint64_t>(k, v); }},
  };
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  if (same_file(a.out_gt, a.out_dets)) throw InvalidInput("--out-gt and --out-dets must differ");
  if (!a.config.empty()) require_distinct(a.config, {a.out_gt, a.out_dets});

  SimulationSetup setup;
  const auto keys = simulation_keys(setup);
  std::map<std::string, std::string> values;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw InvalidInput("cannot open '" + a.config + "'");
    try {
      values = parse_key_values(in);
    } catch (const ParseError& e) {
      throw ParseError(a.config, e);
    }
    for (const auto& [k, v] : values) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const auto& p) { return p.first == k; });
      if (!known) throw InvalidInput(a.config + ": unknown key '" + k + "'");
    }
  }
  for (const auto& [k, opt] : a.flag_options) {
    if (opt->count() > 0) values[k] = a.flag_values.at(k);
  }
  for (const auto& [k, set] : keys) {
    if (const auto it = values.find(k); it != values.end()) set(k, it->second);
  }

  const auto gt = generate(setup.scenario);
  const std::uint64_t cseed = setup.corruption_seed.value_or(setup.scenario.seed ^ 0x9E3779B97F4A7C15ULL);
  const auto dets = corrupt(gt, setup.corruption, cseed);
  write_mot_file(a.out_gt, gt, MotKind::ground_truth);
  write_mot_file(a.out_dets, dets, MotKind::detections);
  out << "simulated " << setup.scenario.fish_count << " fish over " << setup.scenario.frames << " frames ("
      << dets.box_count() << " detections)\n";
  return 0;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-object fish tracking, evaluation and locomotion analysis", "fishtrack"};
  app.require_subcommand(1);

  TrackArgs track;
  auto* track_cmd = app.add_subcommand("track", "Run a tracker over a detections file");
  track_cmd->add_option("--detections", track.detections, "MOT detections file")->required();
  track_cmd->add_option("--out", track.out, "Output MOT tracks file")->required();
  track_cmd->add_option("--tracker", track.tracker, "bytetrack or botsort")
      ->check(CLI::IsMember({"bytetrack", "botsort"}))
      ->capture_default_str();
  track_cmd->add_option("--high-thresh", track.high_thresh, "First-stage score threshold")->capture_default_str();
  track_cmd->add_option("--low-thresh", track.low_thresh, "Second-stage score threshold")->capture_default_str();
  track_cmd->add_option("--new-track-thresh", track.new_track_thresh, "Minimum score to start a track")
      ->capture_default_str();
  track_cmd->add_option("--match-thresh", track.match_thresh, "First-stage IoU distance gate")->capture_default_str();
  track_cmd->add_option("--track-buffer", track.track_buffer, "Frames a lost track survives")->capture_default_str();
  track.fuse_opt = track_cmd->add_flag("--fuse-score,!--no-fuse-score", track.fuse_score,
                                       "Multiply IoU by detection score (default: on for bytetrack)");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score tracks (and optionally detections) against ground truth");
  eval_cmd->add_option("--gt", eval.gt, "MOT ground-truth file")->required();
  eval_cmd->add_option("--tracks", eval.tracks, "MOT tracks file")->required();
  eval_cmd->add_option("--detections", eval.detections, "MOT detections file for mAP");
  eval_cmd->add_option("--iou-gate", eval.iou_gate, "IoU gate for MOTA and IDF1")->capture_default_str();
  eval_cmd->add_option("--json-report", eval.json_report, "Write the report as JSON");
  eval_cmd->add_option("--csv-report", eval.csv_report, "Write the report as key,value CSV");
  eval_cmd->add_flag("--verbose", eval.verbose, "Include the per-alpha HOTA breakdown");

  LocomotionArgs loco;
  auto* loco_cmd = app.add_subcommand("locomotion", "Swimming direction and speed histograms from tracks");
  loco_cmd->add_option("--tracks", loco.tracks, "MOT tracks file")->required();
  loco_cmd->add_option("--out", loco.out, "Direction histogram CSV")->required();
  loco_cmd->add_option("--min-track-len", loco.options.min_track_len, "Shortest track kept (positions)")
      ->capture_default_str();
  loco_cmd->add_option("--window", loco.options.window, "Displacements averaged per sample")->capture_default_str();
  loco_cmd->add_option("--window-stride", loco.options.window_stride, "Window step; 0 = non-overlapping")
      ->capture_default_str();
  loco_cmd->add_option("--bins", loco.bins, "Direction bins over [-90, 90]")->capture_default_str();
  loco_cmd->add_option("--svg", loco.svg, "Direction histogram SVG");
  loco_cmd->add_option("--magnitude-out", loco.magnitude_out, "Magnitude histogram CSV");
  loco_cmd->add_option("--magnitude-svg", loco.magnitude_svg, "Magnitude histogram SVG");
  loco_cmd->add_option("--magnitude-bins", loco.magnitude_bins, "Magnitude bins")->capture_default_str();
  loco_cmd->add_option("--max-magnitude", loco.max_magnitude, "Upper magnitude edge (default: largest observed)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic shoal and a corrupted detection stream");
  sim_cmd->add_option("--config", sim.config, "key = value scenario file");
  sim_cmd->add_option("--out-gt", sim.out_gt, "Output MOT ground-truth file")->required();
  sim_cmd->add_option("--out-dets", sim.out_dets, "Output MOT detections file")->required();
  {
    SimulationSetup probe;
    for (const auto& [key, setter] : simulation_keys(probe)) {
      sim.flag_options[key] = sim_cmd->add_option("--" + dashed(key), sim.flag_values[key], "Overrides '" + key + "'");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "fishtrack: " << first_line(e.what()) << '\n';
    return 1;
  }

  try {
    if (*track_cmd) return run_track(track, out);
    if (*eval_cmd) return run_evaluate(eval, out);
    if (*loco_cmd) return run_locomotion(loco, out, err);
    if (*sim_cmd) return run_simulate(sim, out);
  } catch (const InvalidInput& e) {
    err << "fishtrack: " << first_line(e.what()) << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "fishtrack: " << first_line(e.what()) << '\n';
    return 1;
  } catch (const UndefinedMetric& e) {
    err << "fishtrack: " << first_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "fishtrack: internal error: " << first_line(e.what()) << '\n';
    return 2;
  }
  return 2;
}

}  // namespace fishtrack::cli
