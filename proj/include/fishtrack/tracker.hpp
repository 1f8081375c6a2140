#pragma once

// Two-stage tracking-by-detection in the ByteTrack / BoT-SORT family.
//
// Per frame:
//   1. predict every live track (lost tracks with zeroed size velocity)
//   2. match active+lost tracks to high-score detections (IoU, optionally
//      multiplied by the detection score)
//   3. match still-unmatched active tracks to low-score detections
//   4. match tentative tracks to leftover high-score detections
//   5. spawn tentative tracks from leftover confident detections
//   6. retire tracks that stayed lost longer than the track buffer
//
// The BoT-SORT variant runs without appearance features and with an
// identity camera-motion model; it only differs in its score-fusion default.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fishtrack/annotations.hpp"
#include "fishtrack/assignment.hpp"
#include "fishtrack/errors.hpp"
#include "fishtrack/geometry.hpp"
#include "fishtrack/kalman.hpp"

namespace fishtrack {

enum class TrackStatus { tentative, active, lost, removed };
enum class TrackerVariant { bytetrack, botsort };

inline std::string_view to_string(TrackerVariant v) { return v == TrackerVariant::bytetrack ? "bytetrack" : "botsort"; }

inline std::optional<TrackerVariant> parse_variant(std::string_view name) {
  if (name == "bytetrack") return TrackerVariant::bytetrack;
  if (name == "botsort") return TrackerVariant::botsort;
  return std::nullopt;
}

struct Detection {
  BoundingBox box;
  double score = 1.0;
  int frame = 0;
};

struct TrackedBox {
  int frame = 0;
  int id = 0;
  BoundingBox box;
  double score = 1.0;
};

struct TrackerConfig {
  TrackerVariant variant = TrackerVariant::bytetrack;
  double high_thresh = 0.25;
  double low_thresh = 0.1;
  double new_track_thresh = 0.25;
  double match_thresh = 0.8;  // maximum IoU distance (1 - similarity) in the first stage
  int track_buffer = 30;
  bool fuse_score = true;

  static TrackerConfig defaults(TrackerVariant variant) {
    TrackerConfig cfg;
    cfg.variant = variant;
    cfg.fuse_score = variant == TrackerVariant::bytetrack;
    return cfg;
  }

  void validate() const {
    if (!(0.0 <= low_thresh && low_thresh <= high_thresh && high_thresh <= 1.0)) {
      throw InvalidInput("thresholds must satisfy 0 <= low_thresh <= high_thresh <= 1");
    }
    if (!(0.0 <= new_track_thresh && new_track_thresh <= 1.0)) throw InvalidInput("new_track_thresh must be in [0,1]");
    if (!(0.0 <= match_thresh && match_thresh <= 1.0)) throw InvalidInput("match_thresh must be in [0,1]");
    if (track_buffer < 1) throw InvalidInput("track_buffer must be >= 1");
  }
};

// Similarity gates of the low-score and tentative stages.
inline constexpr double kLowScoreMinIou = 0.5;
inline constexpr double kTentativeMinSimilarity = 0.3;

struct Track {
  int id = 0;
  KalmanState state;
  TrackStatus status = TrackStatus::tentative;
  int start_frame = 0;
  int last_frame = 0;
  int frames_since_update = 0;
  double score = 0.0;
  std::vector<std::pair<int, BoundingBox>> history;  // matched detection boxes
};

class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {}, NoiseModel noise = {}) : config_(config), noise_(noise) {
    config_.validate();
  }

  const TrackerConfig& config() const { return config_; }

  /// Every track created so far (removed ones included), ordered by id.
  const std::vector<Track>& tracks() const { return tracks_; }

  std::optional<int> last_frame() const { return last_frame_; }

  /// Advances the tracker to `frame` and returns the boxes of tracks that
  /// are active in that frame, ordered by id.
  std::vector<TrackedBox> step(int frame, std::span<const Detection> detections) {
    for (const auto& d : detections) {
      if (d.frame != frame) throw InvalidInput("detections passed to one step must share its frame index");
      validate(d.box);
      if (!(d.score >= 0.0 && d.score <= 1.0)) throw InvalidInput("detection score must be in [0,1]");
    }
    if (last_frame_ && frame <= *last_frame_) throw InvalidInput("frame index must increase between steps");
    const bool first_frame = !last_frame_.has_value();
    const int elapsed = first_frame ? 1 : frame - *last_frame_;
    last_frame_ = frame;

    for (std::size_t idx : live_) {
      Track& t = tracks_[idx];
      for (int k = 0; k < elapsed; ++k) {
        if (t.status == TrackStatus::lost) {
          t.state.mean(6) = 0.0;
          t.state.mean(7) = 0.0;
        }
        t.state = predict(t.state, noise_);
      }
    }

    std::vector<std::size_t> high, low;
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (detections[i].score >= config_.high_thresh) {
        high.push_back(i);
      } else if (detections[i].score >= config_.low_thresh) {
        low.push_back(i);
      }
    }

    std::vector<std::size_t> pool, tentative;
    for (std::size_t idx : live_) {
      if (tracks_[idx].status == TrackStatus::active) pool.push_back(idx);
    }
    for (std::size_t idx : live_) {
      if (tracks_[idx].status == TrackStatus::lost) pool.push_back(idx);
      if (tracks_[idx].status == TrackStatus::tentative) tentative.push_back(idx);
    }

    // Stage 1: confident detections against active and lost tracks.
    const auto first =
        associate(pool, detections, high, 1.0 - config_.match_thresh, config_.fuse_score);
    for (const auto& [t, d] : first.matched) apply_match(tracks_[t], detections[d], frame);

    // Stage 2: low-score detections may only extend tracks that were active.
    std::vector<std::size_t> still_active;
    for (std::size_t t : first.unmatched_tracks) {
      if (tracks_[t].status == TrackStatus::active) still_active.push_back(t);
    }
    const auto second = associate(still_active, detections, low, kLowScoreMinIou, false);
    for (const auto& [t, d] : second.matched) apply_match(tracks_[t], detections[d], frame);
    for (std::size_t t : second.unmatched_tracks) tracks_[t].status = TrackStatus::lost;

    // Stage 3: tentative tracks confirm on a second hit or die.
    const auto third =
        associate(tentative, detections, first.unmatched_dets, kTentativeMinSimilarity, config_.fuse_score);
    for (const auto& [t, d] : third.matched) apply_match(tracks_[t], detections[d], frame);
    for (std::size_t t : third.unmatched_tracks) tracks_[t].status = TrackStatus::removed;

    for (std::size_t d : third.unmatched_dets) {
      if (detections[d].score < config_.new_track_thresh) continue;
      spawn(detections[d], frame, first_frame);
    }

    for (std::size_t idx : live_) {
      Track& t = tracks_[idx];
      t.frames_since_update = frame - t.last_frame;
      if (t.status == TrackStatus::lost && t.frames_since_update > config_.track_buffer) {
        t.status = TrackStatus::removed;
      }
    }
    std::erase_if(live_, [&](std::size_t idx) { return tracks_[idx].status == TrackStatus::removed; });

    std::vector<TrackedBox> emitted;
    for (std::size_t idx : live_) {
      const Track& t = tracks_[idx];
      if (t.status == TrackStatus::active && t.last_frame == frame) {
        emitted.push_back({frame, t.id, t.history.back().second, t.score});
      }
    }
    return emitted;
  }

 private:
  struct Association {
    std::vector<std::pair<std::size_t, std::size_t>> matched;  // (track index, detection index)
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_dets;
  };

  Association associate(const std::vector<std::size_t>& track_idx, std::span<const Detection> detections,
                        const std::vector<std::size_t>& det_idx, double min_similarity, bool fuse) const {
    WeightMatrix weights(static_cast<Eigen::Index>(track_idx.size()), static_cast<Eigen::Index>(det_idx.size()));
    for (std::size_t r = 0; r < track_idx.size(); ++r) {
      const BoundingBox predicted = tracks_[track_idx[r]].state.box();
      for (std::size_t c = 0; c < det_idx.size(); ++c) {
        const Detection& d = detections[det_idx[c]];
        double sim = iou(predicted, d.box);
        if (fuse) sim *= d.score;
        weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sim > min_similarity ? sim : 0.0;
      }
    }
    const Assignment a = assign_max_weight(weights, min_similarity);
    Association out;
    for (const auto& [r, c] : a.pairs) out.matched.emplace_back(track_idx[r], det_idx[c]);
    for (std::size_t r : a.unmatched_rows) out.unmatched_tracks.push_back(track_idx[r]);
    for (std::size_t c : a.unmatched_cols) out.unmatched_dets.push_back(det_idx[c]);
    return out;
  }

  void apply_match(Track& t, const Detection& d, int frame) {
    t.state = update(t.state, d.box, noise_);
    t.status = TrackStatus::active;
    t.last_frame = frame;
    t.frames_since_update = 0;
    t.score = d.score;
    t.history.emplace_back(frame, d.box);
  }

  void spawn(const Detection& d, int frame, bool first_frame) {
    Track t;
    t.id = next_id_++;
    t.state = init_state(d.box, noise_);
    // Tracks born in the very first frame are trusted immediately.
    t.status = first_frame ? TrackStatus::active : TrackStatus::tentative;
    t.start_frame = frame;
    t.last_frame = frame;
    t.score = d.score;
    t.history.emplace_back(frame, d.box);
    live_.push_back(tracks_.size());
    tracks_.push_back(std::move(t));
  }

  TrackerConfig config_;
  NoiseModel noise_;
  std::vector<Track> tracks_;
  std::vector<std::size_t> live_;  // indices into tracks_, ascending id
  int next_id_ = 1;
  std::optional<int> last_frame_;
};

/// Runs a tracker over a whole detection sequence. Frames without
/// detections between the first and last frame are stepped predict-only.
inline SequenceAnnotations run_sequence(const SequenceAnnotations& detections, const TrackerConfig& config,
                                        const NoiseModel& noise = {}) {
  SequenceAnnotations out;
  out.name = detections.name;
  out.frame_count = detections.frame_count;
  out.image_size = detections.image_size;
  if (detections.frames.empty()) return out;

  Tracker tracker(config, noise);
  std::vector<Detection> frame_dets;
  for (int frame = detections.frames.begin()->first; frame < detections.length(); ++frame) {
    frame_dets.clear();
    for (const auto& a : detections.at(frame)) frame_dets.push_back({a.box, a.score, frame});
    for (const auto& tb : tracker.step(frame, frame_dets)) out.add(frame, {tb.id, tb.box, tb.score});
  }
  return out;
}

}  // namespace fishtrack
