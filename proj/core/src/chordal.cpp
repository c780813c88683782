#include "qmod/chordal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmod {

ExtendedPoint::ExtendedPoint(Point coords) : coords_(std::move(coords)) {
  for (double c : *coords_) {
    if (!std::isfinite(c)) throw std::invalid_argument("ExtendedPoint: non-finite coordinate");
  }
}

double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y) {
  if (x.is_infinity() && y.is_infinity()) return 0.0;
  if (x.is_infinity() || y.is_infinity()) {
    const Point& f = x.is_infinity() ? y.coords() : x.coords();
    const double r = norm(f);
    return 1.0 / std::sqrt(1.0 + r * r);
  }
  if (x.coords().size() != y.coords().size()) {
    throw std::invalid_argument("chordal_distance: dimension mismatch");
  }
  const double rx = norm(x.coords());
  const double ry = norm(y.coords());
  const double d = distance(x.coords(), y.coords());
  // Rounding can push the quotient a few ulps past 1 for antipodal pairs.
  return std::min(1.0, d / (std::sqrt(1.0 + rx * rx) * std::sqrt(1.0 + ry * ry)));
}

double chordal_diameter(const PointSample& e) {
  if (e.empty()) throw std::invalid_argument("chordal_diameter: empty sample");
  double best = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      best = std::max(best, chordal_distance(e[i], e[j]));
    }
  }
  return best;
}

double chordal_set_distance(const PointSample& a, const PointSample& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chordal_set_distance: empty sample");
  double best = 1.0;
  for (const auto& x : a) {
    for (const auto& y : b) best = std::min(best, chordal_distance(x, y));
  }
  return best;
}

double euclidean_diameter(const std::vector<Point>& e) {
  double best = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) best = std::max(best, distance(e[i], e[j]));
  }
  return best;
}

}  // namespace qmod
