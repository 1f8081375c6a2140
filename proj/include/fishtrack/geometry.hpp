#pragma once

#include <algorithm>
#include <cmath>

#include "fishtrack/errors.hpp"

namespace fishtrack {

/// Axis-aligned box in pixel space. Origin top-left, y grows downward.
/// Zero width or height is legal and yields zero area.
struct BoundingBox {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - w / 2.0, cy - h / 2.0, w, h};
  }

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double center_x() const { return left + width / 2.0; }
  double center_y() const { return top + height / 2.0; }
  double area() const { return width * height; }

  bool is_valid() const {
    return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) &&
           std::isfinite(height) && width >= 0.0 && height >= 0.0;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline void validate(const BoundingBox& box) {
  if (!box.is_valid()) {
    throw InvalidInput("bounding box must have finite coordinates and non-negative size");
  }
}

/// Intersection over union; 0 when the union has no area.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  validate(a);
  validate(b);
  const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace fishtrack
