#pragma once

#include <optional>
#include <vector>

#include "qmod/geometry.hpp"

namespace qmod {

/// A point of the one-point compactification of R^n.
class ExtendedPoint {
 public:
  /// Throws std::invalid_argument if any coordinate is not finite.
  explicit ExtendedPoint(Point coords);
  static ExtendedPoint infinity() { return ExtendedPoint(); }

  bool is_infinity() const { return !coords_.has_value(); }
  /// Precondition: !is_infinity().
  const Point& coords() const { return *coords_; }

 private:
  ExtendedPoint() = default;
  std::optional<Point> coords_;
};

/// Finite sample standing in for a subset of the extended space.
using PointSample = std::vector<ExtendedPoint>;

/// Chordal distance h(x, y); always in [0, 1].
double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y);

/// sup of h over pairs of the sample; 0 for singletons.
double chordal_diameter(const PointSample& e);

/// inf of h over cross pairs.
double chordal_set_distance(const PointSample& a, const PointSample& b);

/// Euclidean diameter of a sample of finite points.
double euclidean_diameter(const std::vector<Point>& e);

}  // namespace qmod
