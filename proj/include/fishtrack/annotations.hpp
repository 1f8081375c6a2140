#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fishtrack/errors.hpp"
#include "fishtrack/geometry.hpp"

namespace fishtrack {

struct Annotation {
  std::optional<int> id;  // absent for raw detections
  BoundingBox box;
  double score = 1.0;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Boxes of one video keyed by 0-based frame index.
struct SequenceAnnotations {
  std::string name;
  std::map<int, std::vector<Annotation>> frames;
  std::optional<int> frame_count;
  std::optional<ImageSize> image_size;

  void add(int frame, Annotation annotation) {
    if (frame < 0) throw InvalidInput("frame index must be non-negative");
    frames[frame].push_back(std::move(annotation));
  }

  bool empty() const { return box_count() == 0; }

  std::size_t box_count() const {
    std::size_t n = 0;
    for (const auto& [frame, boxes] : frames) n += boxes.size();
    return n;
  }

  /// Number of frames the sequence spans: explicit count if set, else last frame + 1.
  int length() const {
    int last = frames.empty() ? 0 : frames.rbegin()->first + 1;
    return frame_count ? std::max(*frame_count, last) : last;
  }

  const std::vector<Annotation>& at(int frame) const {
    static const std::vector<Annotation> none;
    const auto it = frames.find(frame);
    return it == frames.end() ? none : it->second;
  }

  /// Per-identity (frame, box) histories, frames ascending.
  std::map<int, std::vector<std::pair<int, BoundingBox>>> histories() const {
    std::map<int, std::vector<std::pair<int, BoundingBox>>> out;
    for (const auto& [frame, boxes] : frames) {
      for (const auto& a : boxes) {
        if (a.id) out[*a.id].emplace_back(frame, a.box);
      }
    }
    return out;
  }

  friend bool operator==(const SequenceAnnotations&, const SequenceAnnotations&) = default;
};

}  // namespace fishtrack
