// Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit if
// any criterion fails. Oracles here are independent of the library code
// they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fishtrack/fishtrack.hpp"

#ifndef FISHTRACK_CLI_PATH
#define FISHTRACK_CLI_PATH "fishtrack"
#endif

namespace {

using namespace fishtrack;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  enum Kind { pass, fail, skip } kind = pass;
  std::string detail;
};

Outcome fail(std::string why) { return {Outcome::fail, std::move(why)}; }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

// ------------------------------------------------------------ assignment

double exhaustive_optimum(const Eigen::MatrixXd& w) {
  const auto rows = static_cast<std::size_t>(w.rows()), cols = static_cast<std::size_t>(w.cols());
  std::vector<std::size_t> perm(std::max(rows, cols));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (perm[r] < cols) total += w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(perm[r]));
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Outcome assignment_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(500);
  std::uniform_int_distribution<int> dim(1, 7), small(0, 4);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  const int trials = 600;
  int mismatches = 0;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd w(dim(gen), dim(gen));
    // Small integers make exact ties common; exact equality is required.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = trial % 2 == 0 ? small(gen) : val(gen);
    }
    const auto a = assign_max_weight(w, -std::numeric_limits<double>::infinity());
    const double got = a.total_weight(w), want = exhaustive_optimum(w);
    const bool equal = trial % 2 == 0 ? got == want : std::abs(got - want) <= 1e-12 * std::max(1.0, want);
    if (!equal) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  const std::string detail = std::to_string(trials) + " matrices up to 7x7, " + std::to_string(mismatches) +
                             " mismatches, " + fmt(elapsed, 2) + " s";
  if (mismatches > 0 || elapsed >= 10.0) return fail(detail);
  return {Outcome::pass, detail};
}

// ------------------------------------------------------------ kalman

Outcome kalman_exactness() {
  const double vx = 3.0, vy = 4.0;
  auto truth = [&](int k) { return BoundingBox::from_center(100 + vx * k, 100 + vy * k, 20, 10); };
  KalmanState s = init_state(truth(0));
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    s = predict(s);
    if (k >= 15) worst = std::max(worst, std::hypot(s.mean(0) - truth(k).center_x(), s.mean(1) - truth(k).center_y()));
    s = update(s, truth(k));
  }
  const std::string detail = "max one-step-ahead error frames 15-20 = " + fmt(worst, 6) + " px";
  if (!(worst < 0.01)) return fail(detail);
  return {Outcome::pass, detail};
}

// ------------------------------------------------------------ metric oracles

void add_track(SequenceAnnotations& seq, int id, double cy, int first, int last, std::vector<int> skip = {}) {
  for (int f = first; f <= last; ++f) {
    if (std::find(skip.begin(), skip.end(), f) != skip.end()) continue;
    seq.add(f, {id, BoundingBox::from_center(50 + 3.0 * f, cy, 20, 10), 1.0});
  }
}

Outcome metric_oracles() {
  SequenceAnnotations gt;
  add_track(gt, 1, 50, 0, 9);
  add_track(gt, 2, 150, 0, 9);

  // 2 misses on track 1, an id switch on track 2 at frame 5.
  SequenceAnnotations missed;
  add_track(missed, 1, 50, 0, 9, {3, 4});
  add_track(missed, 2, 150, 0, 4);
  add_track(missed, 3, 150, 5, 9);
  const auto mota = compute_mota(gt, missed);

  // Predicted ids swap from the sixth frame on.
  SequenceAnnotations swapped;
  add_track(swapped, 1, 50, 0, 4);
  add_track(swapped, 2, 150, 0, 4);
  add_track(swapped, 2, 50, 5, 9);
  add_track(swapped, 1, 150, 5, 9);
  const auto idf1 = compute_idf1(gt, swapped);
  const auto hota = compute_hota(gt, swapped);

  SequenceAnnotations det_gt, det_pred;
  det_gt.add(0, {std::nullopt, {0, 0, 10, 10}, 1.0});
  det_pred.add(0, {std::nullopt, {0, 0, 6, 10}, 0.9});  // IoU 60/100
  const auto map = compute_map(det_gt, det_pred);

  std::vector<std::string> problems;
  if (!(mota.fn == 2 && mota.idsw == 1 && mota.fp == 0 && std::abs(mota.mota - 0.85) <= 1e-12)) {
    problems.push_back("MOTA " + fmt(mota.mota, 6));
  }
  if (!(idf1.idtp == 10 && idf1.idfp == 10 && idf1.idfn == 10 && idf1.idf1 == 0.5)) {
    problems.push_back("IDF1 " + fmt(idf1.idf1, 6));
  }
  if (!(std::abs(hota.hota - std::sqrt(1.0 / 3.0)) <= 1e-9)) problems.push_back("HOTA " + fmt(hota.hota, 9));
  if (!(std::abs(map.map50_95 - 0.3) <= 1e-12 && map.map50 == 1.0)) problems.push_back("mAP50-95 " + fmt(map.map50_95, 6));

  const std::string detail = "MOTA " + fmt(mota.mota, 6) + ", IDF1 " + fmt(idf1.idf1, 6) + ", HOTA " +
                             fmt(hota.hota, 9) + ", mAP50-95 " + fmt(map.map50_95, 6);
  if (!problems.empty()) return fail(detail);
  return {Outcome::pass, detail};
}

// ------------------------------------------------------------ upper bound

SequenceAnnotations without_ids(SequenceAnnotations seq) {
  for (auto& [f, boxes] : seq.frames) {
    for (auto& a : boxes) a.id.reset();
  }
  return seq;
}

Outcome gt_detection_upper_bound() {
  const auto t0 = Clock::now();
  ShoalScenario sc;
  sc.seed = 2024;
  sc.fish_count = 20;
  sc.frames = 200;
  const auto gt = generate(sc);
  const auto clean = corrupt(gt, CorruptionModel{}, 7);
  CorruptionModel noisy_model;
  noisy_model.miss_rate = 0.1;
  noisy_model.jitter_sigma = 2.0;
  noisy_model.fp_rate_per_frame = 1.0;
  const auto noisy = corrupt(gt, noisy_model, 7);

  std::ostringstream detail;
  bool ok = true;
  for (auto variant : {TrackerVariant::bytetrack, TrackerVariant::botsort}) {
    const auto cfg = TrackerConfig::defaults(variant);
    const auto a = evaluate_tracking(gt, run_sequence(clean, cfg));
    const auto b = evaluate_tracking(gt, run_sequence(noisy, cfg));
    const bool clean_ok = a.mota >= 0.99 && a.hota >= 0.95;
    const bool drops = b.idf1 < a.idf1 && b.mota < a.mota && b.hota < a.hota && b.deta < a.deta && b.assa < a.assa;
    ok = ok && clean_ok && drops;
    detail << to_string(variant) << " clean MOTA " << fmt(a.mota) << " HOTA " << fmt(a.hota) << " IDF1 "
           << fmt(a.idf1) << " -> corrupted MOTA " << fmt(b.mota) << " HOTA " << fmt(b.hota) << " IDF1 "
           << fmt(b.idf1) << "; ";
  }
  const double elapsed = seconds_since(t0);
  detail << fmt(elapsed, 2) << " s";
  if (!ok || elapsed >= 30.0) return fail(detail.str());
  return {Outcome::pass, detail.str()};
}

// ------------------------------------------------------------ locomotion

Outcome locomotion_invariants() {
  std::vector<std::string> problems;
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> len(1, 60);
  std::uniform_real_distribution<double> step(-8, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(gen);
    std::vector<std::pair<int, BoundingBox>> h, mirrored;
    double x = 600, y = 300;
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        x += step(gen);
        y += step(gen);
      }
      h.emplace_back(k, BoundingBox::from_center(x, y, 30, 15));
      mirrored.emplace_back(k, BoundingBox::from_center(1200 - x, y, 30, 15));
    }
    const auto a = track_directions(1, h), b = track_directions(1, mirrored);
    const std::size_t expected = n >= 5 ? static_cast<std::size_t>((n - 1) / 5) : 0;
    if (a.size() != expected || b.size() != expected) {
      problems.push_back("count");
      break;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i].angle_deg - b[i].angle_deg) > 1e-9 || std::abs(a[i].magnitude - b[i].magnitude) > 1e-9) {
        problems.push_back("mirroring");
      }
      if (!(a[i].angle_deg >= -90.0 && a[i].angle_deg <= 90.0)) problems.push_back("angle bounds");
    }
    const auto hist = direction_histogram(a, 1 + trial % 36);
    if (const auto w = hist.normalized()) {
      if (std::abs(std::accumulate(w->begin(), w->end(), 0.0) - 1.0) > 1e-9) problems.push_back("normalization");
    }
  }

  ShoalScenario sc;
  sc.seed = 31;
  sc.heading_noise_sigma = 5.0;
  sc.heading_spread = 0.0;
  const auto gt = generate(sc);
  const auto tracked = run_sequence(without_ids(gt), TrackerConfig{});
  std::string modal;
  for (const auto* seq : {&gt, &tracked}) {
    const auto hist = direction_histogram(sequence_directions(*seq));
    const auto m = hist.modal_bin();
    const bool contains_zero = hist.bin_edges[m] <= 0.0 && 0.0 <= hist.bin_edges[m + 1];
    if (!contains_zero || hist.total() == 0) problems.push_back("modal bin");
    modal += (modal.empty() ? "" : ", ") + std::string(seq == &gt ? "ground truth" : "tracked") + " modal bin [" +
             fmt(hist.bin_edges[m], 0) + ", " + fmt(hist.bin_edges[m + 1], 0) + "]";
  }
  const std::string detail = "1000 random tracks; " + modal;
  if (!problems.empty()) return fail(problems.front() + " violated; " + detail);
  return {Outcome::pass, detail};
}

// ------------------------------------------------------------ determinism

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

bool run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + FISHTRACK_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "fishtrack_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> outputs = {"gt.txt",     "dets.txt",  "tracks.txt", "report.json", "report.csv",
                                            "dirs.csv",   "dirs.svg",  "mag.csv",    "mag.svg"};
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    const bool ok =
        run_cli("simulate --seed 5 --miss-rate 0.1 --jitter-sigma 2 --fp-rate-per-frame 1 --out-gt " +
                quote(d / "gt.txt") + " --out-dets " + quote(d / "dets.txt")) &&
        run_cli("track --detections " + quote(d / "dets.txt") + " --out " + quote(d / "tracks.txt")) &&
        run_cli("evaluate --gt " + quote(d / "gt.txt") + " --tracks " + quote(d / "tracks.txt") + " --detections " +
                quote(d / "dets.txt") + " --verbose --json-report " + quote(d / "report.json") + " --csv-report " +
                quote(d / "report.csv")) &&
        run_cli("locomotion --tracks " + quote(d / "tracks.txt") + " --out " + quote(d / "dirs.csv") + " --svg " +
                quote(d / "dirs.svg") + " --magnitude-out " + quote(d / "mag.csv") + " --magnitude-svg " +
                quote(d / "mag.svg"));
    if (!ok) {
      fs::remove_all(root);
      return fail(std::string("pipeline command failed (") + FISHTRACK_CLI_PATH + ")");
    }
  }
  std::vector<std::string> differing;
  std::size_t bytes = 0;
  for (const auto& name : outputs) {
    const auto a = slurp(root / "a" / name), b = slurp(root / "b" / name);
    if (a.empty() || a != b) differing.push_back(name);
    bytes += a.size();
  }
  fs::remove_all(root);
  if (!differing.empty()) {
    std::string list;
    for (const auto& n : differing) list += " " + n;
    return fail("differing or empty:" + list);
  }
  return {Outcome::pass, std::to_string(outputs.size()) + " files, " + std::to_string(bytes) + " bytes identical"};
}

// ------------------------------------------------------------ dataset

Outcome dataset_reproduction() {
  const char* dir = std::getenv("FISHTRACK_DATASET_DIR");
  if (dir == nullptr || *dir == '\0') return {Outcome::skip, "FISHTRACK_DATASET_DIR not set"};
  const fs::path gt_path = fs::path(dir) / "video_A" / "gt.txt";
  if (!fs::exists(gt_path)) return {Outcome::skip, gt_path.string() + " not found"};
  const auto gt = read_mot_file(gt_path.string(), MotKind::ground_truth);
  const auto tracks = run_sequence(without_ids(gt), TrackerConfig::defaults(TrackerVariant::bytetrack));
  const auto r = evaluate_tracking(gt, tracks);
  const bool ok = std::abs(r.idf1 - 0.756) <= 0.03 && std::abs(r.mota - 0.991) <= 0.03 && std::abs(r.hota - 0.803) <= 0.03;
  const std::string detail = "IDF1 " + fmt(r.idf1, 3) + " (0.756), MOTA " + fmt(r.mota, 3) + " (0.991), HOTA " +
                             fmt(r.hota, 3) + " (0.803), tolerance 0.03";
  if (!ok) return fail(detail);
  return {Outcome::pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"assignment oracle", assignment_oracle},
      {"kalman exactness", kalman_exactness},
      {"metric oracles", metric_oracles},
      {"gt-detection upper bound", gt_detection_upper_bound},
      {"locomotion invariants", locomotion_invariants},
      {"determinism", determinism},
      {"dataset reproduction (video A)", dataset_reproduction},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.kind == Outcome::pass ? "PASS" : o.kind == Outcome::fail ? "FAIL" : "SKIP";
    if (o.kind == Outcome::fail) ++failures;
    std::cout << tag << "  " << name << ": " << o.detail << '\n';
  }
  return failures == 0 ? 0 : 1;
}
