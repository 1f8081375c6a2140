#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "fishtrack/annotations.hpp"
#include "fishtrack/assignment.hpp"
#include "fishtrack/errors.hpp"
#include "fishtrack/metrics_detection.hpp"

namespace fishtrack {

struct MotaResult {
  double mota = 0.0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t idsw = 0;
  std::size_t gt_count = 0;
};

struct IdF1Result {
  double idf1 = 0.0;
  std::size_t idtp = 0;
  std::size_t idfp = 0;
  std::size_t idfn = 0;
};

struct HotaAlpha {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
};

struct HotaResult {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  std::map<double, HotaAlpha> per_alpha;
};

struct TrackingEvalResult {
  double idf1 = 0.0;
  double mota = 0.0;
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  std::size_t idsw = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gt_count = 0;
  std::map<double, HotaAlpha> per_alpha;
};

/// Localization thresholds 0.05, 0.10, ..., 0.95.
inline std::array<double, 19> hota_alphas() {
  std::array<double, 19> a{};
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i + 1) / 20.0;
  return a;
}

namespace detail {

// Frame-aligned view of a gt/pred pair with identities mapped to dense indices.
struct AlignedFrame {
  std::vector<std::size_t> gt_ids;
  std::vector<std::size_t> pred_ids;
  WeightMatrix iou;  // gt x pred
};

struct AlignedSequence {
  std::vector<AlignedFrame> frames;
  std::vector<int> gt_labels;    // dense index -> original id
  std::vector<int> pred_labels;
  std::size_t gt_boxes = 0;
  std::size_t pred_boxes = 0;
};

inline AlignedSequence align(const SequenceAnnotations& gt, const SequenceAnnotations& pred) {
  AlignedSequence out;
  std::map<int, std::size_t> gt_index, pred_index;
  auto index_of = [](std::map<int, std::size_t>& table, std::vector<int>& labels, const Annotation& a,
                     const char* which) {
    if (!a.id) throw InvalidInput(std::string(which) + " boxes must carry identities for tracking evaluation");
    auto [it, inserted] = table.try_emplace(*a.id, labels.size());
    if (inserted) labels.push_back(*a.id);
    return it->second;
  };

  std::set<int> frame_set;
  for (const auto& [f, b] : gt.frames) frame_set.insert(f);
  for (const auto& [f, b] : pred.frames) frame_set.insert(f);

  for (int f : frame_set) {
    AlignedFrame af;
    std::vector<BoundingBox> gb, pb;
    for (const auto& a : gt.at(f)) {
      af.gt_ids.push_back(index_of(gt_index, out.gt_labels, a, "ground-truth"));
      gb.push_back(a.box);
    }
    for (const auto& a : pred.at(f)) {
      af.pred_ids.push_back(index_of(pred_index, out.pred_labels, a, "predicted"));
      pb.push_back(a.box);
    }
    out.gt_boxes += gb.size();
    out.pred_boxes += pb.size();
    af.iou = iou_matrix(gb, pb);
    out.frames.push_back(std::move(af));
  }
  return out;
}

inline void require_ground_truth(const AlignedSequence& seq) {
  if (seq.gt_boxes == 0) throw UndefinedMetric("tracking metrics are undefined without ground-truth boxes");
}

}  // namespace detail

/// CLEAR MOTA. Correspondences from the previous frame are kept whenever
/// they still pass the gate; the remaining boxes are matched by Hungarian on IoU.
inline MotaResult compute_mota(const SequenceAnnotations& gt, const SequenceAnnotations& pred, double iou_gate = 0.5) {
  const auto seq = detail::align(gt, pred);
  detail::require_ground_truth(seq);

  constexpr std::ptrdiff_t none = -1;
  std::vector<std::ptrdiff_t> last_match(seq.gt_labels.size(), none);      // last matched pred, ever
  std::vector<std::ptrdiff_t> previous_frame(seq.gt_labels.size(), none);  // matched pred in the previous frame

  MotaResult res;
  res.gt_count = seq.gt_boxes;
  for (const auto& f : seq.frames) {
    const auto rows = static_cast<Eigen::Index>(f.gt_ids.size());
    const auto cols = static_cast<Eigen::Index>(f.pred_ids.size());
    // Continuity outranks any amount of IoU.
    const double bonus = static_cast<double>(std::min(rows, cols)) + 1.0;
    WeightMatrix w = WeightMatrix::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double v = f.iou(r, c);
        if (v <= iou_gate) continue;
        const bool continued = previous_frame[f.gt_ids[static_cast<std::size_t>(r)]] ==
                               static_cast<std::ptrdiff_t>(f.pred_ids[static_cast<std::size_t>(c)]);
        w(r, c) = v + (continued ? bonus : 0.0);
      }
    }
    const Assignment a = assign_max_weight(w, 0.0);

    std::fill(previous_frame.begin(), previous_frame.end(), none);
    for (const auto& [r, c] : a.pairs) {
      const std::size_t g = f.gt_ids[r];
      const auto p = static_cast<std::ptrdiff_t>(f.pred_ids[c]);
      if (last_match[g] != none && last_match[g] != p) ++res.idsw;
      last_match[g] = p;
      previous_frame[g] = p;
    }
    res.fn += f.gt_ids.size() - a.pairs.size();
    res.fp += f.pred_ids.size() - a.pairs.size();
  }
  res.mota = 1.0 - static_cast<double>(res.fn + res.fp + res.idsw) / static_cast<double>(res.gt_count);
  return res;
}

/// Identity F1 from a global one-to-one matching of gt and predicted
/// identities that maximizes the number of co-located frames.
inline IdF1Result compute_idf1(const SequenceAnnotations& gt, const SequenceAnnotations& pred, double iou_gate = 0.5) {
  const auto seq = detail::align(gt, pred);
  detail::require_ground_truth(seq);

  WeightMatrix overlap = WeightMatrix::Zero(static_cast<Eigen::Index>(seq.gt_labels.size()),
                                            static_cast<Eigen::Index>(seq.pred_labels.size()));
  for (const auto& f : seq.frames) {
    for (std::size_t r = 0; r < f.gt_ids.size(); ++r) {
      for (std::size_t c = 0; c < f.pred_ids.size(); ++c) {
        if (f.iou(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) > iou_gate) {
          overlap(static_cast<Eigen::Index>(f.gt_ids[r]), static_cast<Eigen::Index>(f.pred_ids[c])) += 1.0;
        }
      }
    }
  }
  const Assignment a = assign_max_weight(overlap, 0.0);
  IdF1Result res;
  res.idtp = static_cast<std::size_t>(std::llround(a.total_weight(overlap)));
  res.idfn = seq.gt_boxes - res.idtp;
  res.idfp = seq.pred_boxes - res.idtp;
  res.idf1 = 2.0 * static_cast<double>(res.idtp) / static_cast<double>(2 * res.idtp + res.idfp + res.idfn);
  return res;
}

/// HOTA with its DetA/AssA decomposition. A first pass accumulates soft
/// identity alignment scores over the whole sequence; per alpha, frames are
/// then matched on alignment-weighted IoU.
inline HotaResult compute_hota(const SequenceAnnotations& gt, const SequenceAnnotations& pred) {
  const auto seq = detail::align(gt, pred);
  detail::require_ground_truth(seq);
  const auto n_gt = static_cast<Eigen::Index>(seq.gt_labels.size());
  const auto n_pr = static_cast<Eigen::Index>(seq.pred_labels.size());
  constexpr double eps = 1e-12;

  Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(n_gt, n_pr);
  Eigen::VectorXd gt_id_count = Eigen::VectorXd::Zero(n_gt);
  Eigen::VectorXd pred_id_count = Eigen::VectorXd::Zero(n_pr);
  for (const auto& f : seq.frames) {
    const Eigen::VectorXd row_sum = f.iou.rowwise().sum();
    const Eigen::RowVectorXd col_sum = f.iou.colwise().sum();
    for (std::size_t r = 0; r < f.gt_ids.size(); ++r) {
      for (std::size_t c = 0; c < f.pred_ids.size(); ++c) {
        const auto ri = static_cast<Eigen::Index>(r), ci = static_cast<Eigen::Index>(c);
        const double sim = f.iou(ri, ci);
        const double denom = row_sum(ri) + col_sum(ci) - sim;
        if (denom > eps) {
          potential(static_cast<Eigen::Index>(f.gt_ids[r]), static_cast<Eigen::Index>(f.pred_ids[c])) += sim / denom;
        }
      }
    }
    for (std::size_t g : f.gt_ids) gt_id_count(static_cast<Eigen::Index>(g)) += 1.0;
    for (std::size_t p : f.pred_ids) pred_id_count(static_cast<Eigen::Index>(p)) += 1.0;
  }
  Eigen::MatrixXd alignment(n_gt, n_pr);
  for (Eigen::Index g = 0; g < n_gt; ++g) {
    for (Eigen::Index p = 0; p < n_pr; ++p) {
      alignment(g, p) = potential(g, p) / (gt_id_count(g) + pred_id_count(p) - potential(g, p));
    }
  }

  const auto alphas = hota_alphas();
  std::vector<Eigen::MatrixXd> match_counts(alphas.size(), Eigen::MatrixXd::Zero(n_gt, n_pr));
  std::vector<double> tp(alphas.size(), 0.0), fn(alphas.size(), 0.0), fp(alphas.size(), 0.0);

  for (const auto& f : seq.frames) {
    const std::size_t ng = f.gt_ids.size(), np = f.pred_ids.size();
    if (ng == 0 || np == 0) {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        fn[a] += static_cast<double>(ng);
        fp[a] += static_cast<double>(np);
      }
      continue;
    }
    WeightMatrix score(static_cast<Eigen::Index>(ng), static_cast<Eigen::Index>(np));
    for (std::size_t r = 0; r < ng; ++r) {
      for (std::size_t c = 0; c < np; ++c) {
        const auto ri = static_cast<Eigen::Index>(r), ci = static_cast<Eigen::Index>(c);
        score(ri, ci) = alignment(static_cast<Eigen::Index>(f.gt_ids[r]), static_cast<Eigen::Index>(f.pred_ids[c])) *
                        f.iou(ri, ci);
      }
    }
    const auto row_to_col = solve_max_weight(score);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::size_t matched = 0;
      for (std::size_t r = 0; r < ng; ++r) {
        const auto c = row_to_col[r];
        if (c < 0) continue;
        if (f.iou(static_cast<Eigen::Index>(r), c) >= alphas[a] - eps) {
          ++matched;
          match_counts[a](static_cast<Eigen::Index>(f.gt_ids[r]),
                          static_cast<Eigen::Index>(f.pred_ids[static_cast<std::size_t>(c)])) += 1.0;
        }
      }
      tp[a] += static_cast<double>(matched);
      fn[a] += static_cast<double>(ng - matched);
      fp[a] += static_cast<double>(np - matched);
    }
  }

  HotaResult res;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const Eigen::MatrixXd& counts = match_counts[a];
    double ass_sum = 0.0;
    for (Eigen::Index g = 0; g < n_gt; ++g) {
      for (Eigen::Index p = 0; p < n_pr; ++p) {
        const double c = counts(g, p);
        if (c <= 0.0) continue;
        // Every TP of this (gt, pred) pair shares TPA/(TPA+FNA+FPA).
        ass_sum += c * c / (gt_id_count(g) + pred_id_count(p) - c);
      }
    }
    HotaAlpha h;
    h.deta = tp[a] / std::max(1.0, tp[a] + fn[a] + fp[a]);
    h.assa = ass_sum / std::max(1.0, tp[a]);
    h.hota = std::sqrt(h.deta * h.assa);
    res.per_alpha[alphas[a]] = h;
    res.hota += h.hota;
    res.deta += h.deta;
    res.assa += h.assa;
  }
  const auto n = static_cast<double>(alphas.size());
  res.hota /= n;
  res.deta /= n;
  res.assa /= n;
  return res;
}

inline TrackingEvalResult evaluate_tracking(const SequenceAnnotations& gt, const SequenceAnnotations& pred,
                                            double iou_gate = 0.5) {
  const MotaResult mota = compute_mota(gt, pred, iou_gate);
  const IdF1Result idf1 = compute_idf1(gt, pred, iou_gate);
  const HotaResult hota = compute_hota(gt, pred);
  TrackingEvalResult res;
  res.idf1 = idf1.idf1;
  res.mota = mota.mota;
  res.hota = hota.hota;
  res.deta = hota.deta;
  res.assa = hota.assa;
  res.idsw = mota.idsw;
  res.fp = mota.fp;
  res.fn = mota.fn;
  res.gt_count = mota.gt_count;
  res.per_alpha = hota.per_alpha;
  return res;
}

}  // namespace fishtrack
