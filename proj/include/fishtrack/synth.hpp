#pragma once

// Deterministic synthetic shoal: ground-truth tracks plus corrupted
// detection streams for exercising the tracker, metrics and locomotion code.
//
// Each fish owns an xoshiro256** substream obtained by jumping the scenario
// stream once per fish (fish 1 uses the unjumped stream). Headings are kept
// as unit vectors so that axis-aligned motion stays exactly axis-aligned.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "fishtrack/annotations.hpp"
#include "fishtrack/errors.hpp"
#include "fishtrack/geometry.hpp"
#include "fishtrack/random.hpp"

namespace fishtrack {

struct ShoalScenario {
  std::uint64_t seed = 1;
  int fish_count = 20;
  int frames = 200;
  int tank_width = 1280;
  int tank_height = 720;
  double speed_min = 2.0;  // pixels/frame
  double speed_max = 6.0;
  double heading_noise_sigma = 5.0;  // degrees, per-frame jitter around the cruise heading
  double turn_probability = 0.01;    // per-frame chance of reversing horizontal direction
  double heading_spread = 20.0;      // initial cruise heading within +-spread degrees of horizontal
  double box_min = 30.0;             // box width range, pixels
  double box_max = 60.0;
  double aspect_ratio = 0.5;  // box height / width

  void validate() const {
    if (tank_width <= 0 || tank_height <= 0) throw InvalidInput("tank must have positive width and height");
    if (fish_count < 1 || frames < 1) throw InvalidInput("fish_count and frames must be positive");
    if (!(0.0 <= speed_min && speed_min <= speed_max)) throw InvalidInput("speed range must satisfy 0 <= min <= max");
    if (!(heading_noise_sigma >= 0.0)) throw InvalidInput("heading_noise_sigma must be non-negative");
    if (!(0.0 <= turn_probability && turn_probability <= 1.0)) throw InvalidInput("turn_probability must be in [0,1]");
    if (!(0.0 <= heading_spread && heading_spread <= 90.0)) throw InvalidInput("heading_spread must be in [0,90]");
    if (!(0.0 < box_min && box_min <= box_max)) throw InvalidInput("box size range must satisfy 0 < min <= max");
    if (!(aspect_ratio > 0.0)) throw InvalidInput("aspect_ratio must be positive");
    if (box_max >= tank_width || box_max * aspect_ratio >= tank_height) {
      throw InvalidInput("largest fish box must fit inside the tank");
    }
  }
};

struct CorruptionModel {
  double miss_rate = 0.0;
  double fp_rate_per_frame = 0.0;  // Poisson mean
  double jitter_sigma = 0.0;       // pixels, applied to left/top/width/height
  double tp_score_mean = 0.9;
  double fp_score_mean = 0.3;
  double score_sigma = 0.1;
  double fp_box_min = 30.0;  // false-positive box width range
  double fp_box_max = 60.0;
  double fp_aspect_ratio = 0.5;

  void validate() const {
    if (!(0.0 <= miss_rate && miss_rate <= 1.0)) throw InvalidInput("miss_rate must be in [0,1]");
    if (!(fp_rate_per_frame >= 0.0 && jitter_sigma >= 0.0 && score_sigma >= 0.0)) {
      throw InvalidInput("rates and sigmas must be non-negative");
    }
    if (!(0.0 < fp_box_min && fp_box_min <= fp_box_max && fp_aspect_ratio > 0.0)) {
      throw InvalidInput("false-positive box size range is invalid");
    }
  }
};

namespace detail {

struct Heading {
  double x;
  double y;  // math convention: positive is up
};

inline Heading rotated(Heading h, double degrees) {
  if (degrees == 0.0) return h;
  const double r = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(r), s = std::sin(r);
  return {h.x * c - h.y * s, h.x * s + h.y * c};
}

// Reflects a coordinate into [lo, hi]; returns true if a wall was hit.
inline bool reflect(double& v, double lo, double hi) {
  bool hit = false;
  if (v < lo) {
    v = 2.0 * lo - v;
    hit = true;
  } else if (v > hi) {
    v = 2.0 * hi - v;
    hit = true;
  }
  v = std::clamp(v, lo, hi);
  return hit;
}

}  // namespace detail

/// Ground truth for a scenario: identities 1..fish_count, one box per fish
/// per frame, every box inside the tank.
inline SequenceAnnotations generate(const ShoalScenario& sc) {
  sc.validate();
  SequenceAnnotations gt;
  gt.name = "synthetic-shoal";
  gt.frame_count = sc.frames;
  gt.image_size = ImageSize{sc.tank_width, sc.tank_height};

  const double tank_w = sc.tank_width, tank_h = sc.tank_height;
  Xoshiro256 stream(sc.seed);
  for (int fish = 1; fish <= sc.fish_count; ++fish) {
    Xoshiro256 rng = stream;
    stream.jump();

    const double w = rng.uniform(sc.box_min, sc.box_max);
    const double h = w * sc.aspect_ratio;
    double cx = rng.uniform(w / 2.0, tank_w - w / 2.0);
    double cy = rng.uniform(h / 2.0, tank_h - h / 2.0);
    const double speed = rng.uniform(sc.speed_min, sc.speed_max);
    detail::Heading cruise = detail::rotated({1.0, 0.0}, rng.uniform(-sc.heading_spread, sc.heading_spread));
    if (rng.uniform() < 0.5) cruise.x = -cruise.x;

    for (int frame = 0; frame < sc.frames; ++frame) {
      gt.add(frame, {fish, BoundingBox::from_center(cx, cy, w, h), 1.0});

      if (rng.uniform() < sc.turn_probability) cruise.x = -cruise.x;
      const detail::Heading heading = detail::rotated(cruise, sc.heading_noise_sigma * rng.normal());
      cx += speed * heading.x;
      cy -= speed * heading.y;  // image y grows downward
      if (detail::reflect(cx, w / 2.0, tank_w - w / 2.0)) cruise.x = -cruise.x;
      if (detail::reflect(cy, h / 2.0, tank_h - h / 2.0)) cruise.y = -cruise.y;
    }
  }
  return gt;
}

/// Detection stream derived from ground truth: boxes dropped with
/// `miss_rate`, jittered, scored, plus Poisson false positives placed
/// uniformly in the tank. Detections carry no identity.
inline SequenceAnnotations corrupt(const SequenceAnnotations& gt, const CorruptionModel& model, std::uint64_t seed) {
  model.validate();
  double tank_w = 0.0, tank_h = 0.0;
  if (gt.image_size) {
    tank_w = gt.image_size->width;
    tank_h = gt.image_size->height;
  } else {
    for (const auto& [f, boxes] : gt.frames) {
      for (const auto& a : boxes) {
        tank_w = std::max(tank_w, a.box.right());
        tank_h = std::max(tank_h, a.box.bottom());
      }
    }
  }
  if (model.fp_rate_per_frame > 0.0 && (tank_w <= 0.0 || tank_h <= 0.0)) {
    throw InvalidInput("false positives need a tank extent (image size or ground-truth boxes)");
  }

  SequenceAnnotations out;
  out.name = gt.name;
  out.frame_count = gt.frame_count;
  out.image_size = gt.image_size;

  auto score = [&](Xoshiro256& rng, double mean) { return std::clamp(rng.normal(mean, model.score_sigma), 0.0, 1.0); };

  Xoshiro256 rng(seed);
  for (int frame = 0; frame < gt.length(); ++frame) {
    for (const auto& a : gt.at(frame)) {
      if (rng.uniform() < model.miss_rate) continue;
      BoundingBox b = a.box;
      b.left += model.jitter_sigma * rng.normal();
      b.top += model.jitter_sigma * rng.normal();
      b.width = std::max(0.0, b.width + model.jitter_sigma * rng.normal());
      b.height = std::max(0.0, b.height + model.jitter_sigma * rng.normal());
      out.add(frame, {std::nullopt, b, score(rng, model.tp_score_mean)});
    }
    const auto fps = rng.poisson(model.fp_rate_per_frame);
    for (std::uint64_t k = 0; k < fps; ++k) {
      const double w = std::min(rng.uniform(model.fp_box_min, model.fp_box_max), tank_w);
      const double h = std::min(w * model.fp_aspect_ratio, tank_h);
      const double left = rng.uniform(0.0, tank_w - w);
      const double top = rng.uniform(0.0, tank_h - h);
      out.add(frame, {std::nullopt, {left, top, w, h}, score(rng, model.fp_score_mean)});
    }
  }
  return out;
}

}  // namespace fishtrack
