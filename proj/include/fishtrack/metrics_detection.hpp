#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "fishtrack/annotations.hpp"
#include "fishtrack/assignment.hpp"
#include "fishtrack/geometry.hpp"

namespace fishtrack {

struct ScoredBox {
  BoundingBox box;
  double score = 1.0;
};

/// Whether a pair at exactly the threshold counts as a match.
enum class IouGate { strict, inclusive };

struct FrameMatch {
  std::vector<std::pair<std::size_t, std::size_t>> tp_pairs;  // (gt index, pred index)
  std::vector<std::size_t> fp_indices;                       // unmatched predictions
  std::vector<std::size_t> fn_indices;                       // unmatched ground truth
};

/// Hungarian matching on a precomputed gt x pred IoU matrix.
inline FrameMatch match_iou_matrix(const WeightMatrix& ious, double iou_thresh, IouGate gate = IouGate::strict) {
  WeightMatrix weights = ious;
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      const double v = ious(r, c);
      const bool ok = gate == IouGate::strict ? v > iou_thresh : v >= iou_thresh;
      weights(r, c) = ok ? v : 0.0;
    }
  }
  // Zeroed entries never survive; everything else passed the gate already.
  const Assignment a = assign_max_weight(weights, 0.0);
  FrameMatch m;
  m.tp_pairs = a.pairs;
  m.fn_indices = a.unmatched_rows;
  m.fp_indices = a.unmatched_cols;
  return m;
}

inline WeightMatrix iou_matrix(std::span<const BoundingBox> rows, std::span<const BoundingBox> cols) {
  WeightMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = iou(rows[r], cols[c]);
    }
  }
  return m;
}

/// Matches one frame's predictions to ground truth; unassigned ground truth
/// boxes are false negatives, unassigned predictions false positives.
inline FrameMatch match_frame(std::span<const BoundingBox> gt, std::span<const ScoredBox> preds, double iou_thresh,
                              IouGate gate = IouGate::strict) {
  std::vector<BoundingBox> pred_boxes;
  pred_boxes.reserve(preds.size());
  for (const auto& p : preds) pred_boxes.push_back(p.box);
  return match_iou_matrix(iou_matrix(gt, pred_boxes), iou_thresh, gate);
}

/// IoU thresholds 0.50, 0.55, ..., 0.95.
inline std::array<double, 10> map_thresholds() {
  std::array<double, 10> t{};
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(50 + 5 * i) / 100.0;
  return t;
}

/// 101-point interpolated average precision. `ranked` holds one TP flag
/// (0/1) per prediction, ordered by descending confidence.
inline double interpolated_ap(std::span<const char> ranked, std::size_t gt_count) {
  if (gt_count == 0 || ranked.empty()) return 0.0;
  std::vector<double> precision(ranked.size()), recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    tp += ranked[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(gt_count);
  }
  // Precision envelope: make it non-increasing from the right.
  for (std::size_t k = ranked.size() - 1; k > 0; --k) precision[k - 1] = std::max(precision[k - 1], precision[k]);

  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

struct DetectionEvalResult {
  double precision = 0.0;
  double recall = 0.0;
  std::map<double, double> ap_per_threshold;
  double map50 = 0.0;
  double map50_95 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool precision_undefined = false;  // no predictions
  bool recall_undefined = false;     // no ground truth
};

/// Single-class detection evaluation. Matching is redone per frame for every
/// IoU threshold; a pair at exactly the threshold counts (COCO convention).
/// Precision/recall/counts are reported at IoU 0.5.
inline DetectionEvalResult compute_map(const SequenceAnnotations& gt, const SequenceAnnotations& preds) {
  struct Ranked {
    double score;
    int frame;
    std::size_t index;
  };
  std::vector<Ranked> order;
  for (const auto& [frame, boxes] : preds.frames) {
    for (std::size_t i = 0; i < boxes.size(); ++i) order.push_back({boxes[i].score, frame, i});
  }
  std::stable_sort(order.begin(), order.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  std::map<int, bool> frames;
  for (const auto& [f, b] : gt.frames) frames[f] = true;
  for (const auto& [f, b] : preds.frames) frames[f] = true;

  const std::size_t gt_count = gt.box_count();
  DetectionEvalResult res;
  res.precision_undefined = order.empty();
  res.recall_undefined = gt_count == 0;

  for (double thresh : map_thresholds()) {
    std::map<int, std::vector<char>> is_tp;  // frame -> flag per prediction
    std::size_t tp = 0;
    for (const auto& [frame, unused] : frames) {
      std::vector<BoundingBox> g;
      for (const auto& a : gt.at(frame)) g.push_back(a.box);
      std::vector<ScoredBox> p;
      for (const auto& a : preds.at(frame)) p.push_back({a.box, a.score});
      const FrameMatch m = match_frame(g, p, thresh, IouGate::inclusive);
      auto& flags = is_tp[frame];
      flags.assign(p.size(), 0);
      for (const auto& [gi, pi] : m.tp_pairs) flags[pi] = 1;
      tp += m.tp_pairs.size();
    }
    std::vector<char> ranked;
    ranked.reserve(order.size());
    for (const auto& o : order) ranked.push_back(is_tp[o.frame][o.index]);
    res.ap_per_threshold[thresh] = interpolated_ap(ranked, gt_count);

    if (thresh == 0.5) {
      res.tp = tp;
      res.fp = order.size() - tp;
      res.fn = gt_count - tp;
      res.precision = order.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(order.size());
      res.recall = gt_count == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gt_count);
    }
  }
  res.map50 = res.ap_per_threshold.at(0.5);
  double sum = 0.0;
  for (const auto& [t, ap] : res.ap_per_threshold) sum += ap;
  res.map50_95 = sum / static_cast<double>(res.ap_per_threshold.size());
  return res;
}

}  // namespace fishtrack
