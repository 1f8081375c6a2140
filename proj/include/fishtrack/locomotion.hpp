#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fishtrack/annotations.hpp"
#include "fishtrack/errors.hpp"
#include "fishtrack/geometry.hpp"

namespace fishtrack {

/// Swimming direction of one track over one window. The angle is folded
/// onto the right half-plane: -90 is straight down, +90 straight up.
struct DirectionSample {
  double angle_deg = 0.0;
  double magnitude = 0.0;  // pixels per frame
  int track_id = 0;
  int window_start_frame = 0;
};

struct LocomotionOptions {
  int min_track_len = 5;  // positions; shorter tracks are treated as noise
  int window = 5;         // displacements averaged per sample
  int window_stride = 0;  // 0 means non-overlapping (stride = window)

  int stride() const { return window_stride > 0 ? window_stride : window; }

  void validate() const {
    if (min_track_len < 2) throw InvalidInput("min_track_len must be >= 2");
    if (window < 1) throw InvalidInput("window must be >= 1");
    if (window_stride < 0) throw InvalidInput("window_stride must be >= 0");
  }
};

/// Folds a mean displacement (image coordinates) into a direction sample.
inline DirectionSample direction_from_displacement(double dx, double dy) {
  DirectionSample s;
  s.angle_deg = std::atan2(-dy, std::abs(dx)) * 180.0 / std::numbers::pi;
  if (s.angle_deg == 0.0) s.angle_deg = 0.0;  // drop negative zero
  s.magnitude = std::hypot(dx, dy);
  return s;
}

/// Direction samples for one track history (frames strictly increasing).
/// Center displacements between consecutive positions are normalized by the
/// frame gap, averaged as vectors per window, then mirrored.
inline std::vector<DirectionSample> track_directions(int track_id,
                                                     std::span<const std::pair<int, BoundingBox>> history,
                                                     const LocomotionOptions& opts = {}) {
  opts.validate();
  std::vector<DirectionSample> out;
  if (history.size() < static_cast<std::size_t>(opts.min_track_len)) return out;

  std::vector<std::pair<double, double>> steps;
  steps.reserve(history.size() - 1);
  for (std::size_t k = 1; k < history.size(); ++k) {
    const int gap = history[k].first - history[k - 1].first;
    if (gap <= 0) throw InvalidInput("track history frames must be strictly increasing");
    const auto& a = history[k - 1].second;
    const auto& b = history[k].second;
    steps.emplace_back((b.center_x() - a.center_x()) / gap, (b.center_y() - a.center_y()) / gap);
  }

  const auto window = static_cast<std::size_t>(opts.window);
  const auto stride = static_cast<std::size_t>(opts.stride());
  for (std::size_t start = 0; start + window <= steps.size(); start += stride) {
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = start; k < start + window; ++k) {
      sx += steps[k].first;
      sy += steps[k].second;
    }
    DirectionSample s = direction_from_displacement(sx / static_cast<double>(window), sy / static_cast<double>(window));
    s.track_id = track_id;
    s.window_start_frame = history[start].first;
    out.push_back(s);
  }
  return out;
}

/// Samples for every identity in a tracks sequence, ordered by id.
inline std::vector<DirectionSample> sequence_directions(const SequenceAnnotations& tracks,
                                                        const LocomotionOptions& opts = {}) {
  std::vector<DirectionSample> out;
  for (const auto& [id, history] : tracks.histories()) {
    auto samples = track_directions(id, history, opts);
    out.insert(out.end(), samples.begin(), samples.end());
  }
  return out;
}

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t overflow = 0;  // values clamped into the last bin

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }

  /// Per-bin weights summing to 1; empty when there is no mass.
  std::optional<std::vector<double>> normalized() const {
    const auto n = total();
    if (n == 0) return std::nullopt;
    std::vector<double> w;
    w.reserve(counts.size());
    for (auto c : counts) w.push_back(static_cast<double>(c) / static_cast<double>(n));
    return w;
  }

  std::size_t modal_bin() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
      if (counts[i] > counts[best]) best = i;
    }
    return best;
  }
};

/// Which side of each bin is closed. `left`: [a, b) with the last bin
/// closed on both ends. `right`: (a, b] with the first bin closed.
enum class BinClosure { left, right };

/// Uniform bins over [lo, hi]. Values above `hi` are clamped into the last
/// bin and tallied as overflow; values below `lo` go into the first bin.
inline Histogram uniform_histogram(std::span<const double> values, int bins, double lo, double hi,
                                   BinClosure closure = BinClosure::left) {
  if (bins < 1) throw InvalidInput("histogram needs at least one bin");
  if (!(hi > lo)) throw InvalidInput("histogram range must be non-empty");
  Histogram h;
  const auto n = static_cast<std::size_t>(bins);
  h.bin_edges.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) h.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  h.counts.assign(n, 0);
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("histogram values must be finite");
    if (v > hi) ++h.overflow;
    const double pos = (std::min(std::max(v, lo), hi) - lo) * static_cast<double>(n) / (hi - lo);
    double slot = closure == BinClosure::left ? std::floor(pos) : std::ceil(pos) - 1.0;
    slot = std::min(std::max(slot, 0.0), static_cast<double>(n - 1));
    ++h.counts[static_cast<std::size_t>(slot)];
  }
  return h;
}

inline Histogram direction_histogram(std::span<const DirectionSample> samples, int bins = 18) {
  std::vector<double> angles;
  angles.reserve(samples.size());
  for (const auto& s : samples) angles.push_back(s.angle_deg);
  return uniform_histogram(angles, bins, -90.0, 90.0);
}

inline Histogram magnitude_histogram(std::span<const DirectionSample> samples, int bins, double max_magnitude) {
  if (!(max_magnitude > 0.0)) throw InvalidInput("max_magnitude must be positive");
  std::vector<double> mags;
  mags.reserve(samples.size());
  for (const auto& s : samples) mags.push_back(s.magnitude);
  return uniform_histogram(mags, bins, 0.0, max_magnitude, BinClosure::right);
}

}  // namespace fishtrack
