#include "qmod/capacity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmod/constants.hpp"

namespace qmod {

double ring_capacity_exact(double r1, double r2, const Exponents& e) {
  if (!(r1 > 0.0 && r2 > r1)) throw std::invalid_argument("ring capacity: need 0 < r1 < r2");
  const int n = e.n();
  const double p = e.p();
  const double omega = unit_sphere_area(n);
  if (e.conformal()) {
    if (std::isinf(r2)) return 0.0;
    return omega * std::pow(std::log(r2 / r1), 1.0 - n);
  }
  // Closed-form ring integral for Q = 1: (p-1)/(n-p) (r1^k - r2^k), k = (p-n)/(p-1) < 0.
  const double k = (p - n) / (p - 1.0);
  const double outer = std::isinf(r2) ? 0.0 : std::pow(r2, k);
  const double integral = (p - 1.0) / (n - p) * std::abs(std::pow(r1, k) - outer);
  return omega / std::pow(integral, p - 1.0);
}

double ring_capacity_exact(const RingCondenser& ring, const Exponents& e) {
  if (ring.dimension() != e.n()) throw std::invalid_argument("ring capacity: dimension mismatch");
  return ring_capacity_exact(ring.r1(), ring.r2(), e);
}

double mazya_lower_bound(double measure_c, const Exponents& e) {
  const int n = e.n();
  const double p = e.p();
  if (!(p < n)) throw std::domain_error("mazya bound: requires p < n");
  if (!(measure_c >= 0.0)) throw std::invalid_argument("mazya bound: measure must be >= 0");
  return n * std::pow(unit_ball_volume(n), p / n) * std::pow((n - p) / (p - 1.0), p - 1.0) *
         std::pow(measure_c, (n - p) / n);
}

double kruglikov_lower_bound(double diameter_c, double measure_a, const Exponents& e, double b_n) {
  const int n = e.n();
  const double p = e.p();
  if (!(p > n - 1.0)) throw std::domain_error("kruglikov bound: requires p > n - 1");
  if (!(diameter_c >= 0.0 && measure_a > 0.0 && b_n > 0.0)) {
    throw std::invalid_argument("kruglikov bound: need d >= 0, m(A) > 0, b_n > 0");
  }
  return std::pow(b_n * std::pow(diameter_c, p) / std::pow(measure_a, 1.0 - n + p), 1.0 / (n - 1.0));
}

double calibrate_kruglikov_constant(double capacity, double diameter_c, double measure_a,
                                    const Exponents& e) {
  const int n = e.n();
  const double p = e.p();
  if (!(capacity > 0.0 && diameter_c > 0.0 && measure_a > 0.0)) {
    throw std::invalid_argument("kruglikov calibration: inputs must be positive");
  }
  return std::pow(capacity, n - 1.0) * std::pow(measure_a, 1.0 - n + p) / std::pow(diameter_c, p);
}

int dimension(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) return static_cast<int>(b->center.size());
  return static_cast<int>(std::get<Box>(r).lo.size());
}

double measure(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) {
    const int n = static_cast<int>(b->center.size());
    return unit_ball_volume(n) * std::pow(b->radius, n);
  }
  const auto& box = std::get<Box>(r);
  double v = 1.0;
  for (std::size_t i = 0; i < box.lo.size(); ++i) v *= box.hi[i] - box.lo[i];
  return v;
}

double diameter(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) return 2.0 * b->radius;
  const auto& box = std::get<Box>(r);
  return distance(box.lo, box.hi);
}

void validate(const Condenser& c) {
  const int n = dimension(c.outer);
  if (n < 2 || dimension(c.inner) != n) throw std::invalid_argument("condenser: dimension mismatch");
  if (const auto* b = std::get_if<Ball>(&c.outer); b && !(b->radius > 0.0)) {
    throw std::invalid_argument("condenser: outer radius must be positive");
  }
  if (const auto* b = std::get_if<Box>(&c.outer)) {
    for (int i = 0; i < n; ++i) {
      if (!(b->hi[i] > b->lo[i])) throw std::invalid_argument("condenser: outer box must be open");
    }
  }
  if (const auto* b = std::get_if<Ball>(&c.inner); b && !(b->radius >= 0.0)) {
    throw std::invalid_argument("condenser: inner radius must be >= 0");
  }
  if (const auto* b = std::get_if<Box>(&c.inner)) {
    for (int i = 0; i < n; ++i) {
      if (!(b->hi[i] >= b->lo[i])) throw std::invalid_argument("condenser: inner box has lo > hi");
    }
  }
  // Closed C inside open A.
  bool inside = true;
  if (const auto* a = std::get_if<Ball>(&c.outer)) {
    if (const auto* b = std::get_if<Ball>(&c.inner)) {
      inside = distance(a->center, b->center) + b->radius < a->radius;
    } else {
      const auto& box = std::get<Box>(c.inner);
      // Farthest corner of the box from the ball center.
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = std::max(std::abs(box.lo[i] - a->center[i]), std::abs(box.hi[i] - a->center[i]));
        s += d * d;
      }
      inside = std::sqrt(s) < a->radius;
    }
  } else {
    const auto& outer = std::get<Box>(c.outer);
    for (int i = 0; i < n && inside; ++i) {
      double lo = 0.0;
      double hi = 0.0;
      if (const auto* b = std::get_if<Ball>(&c.inner)) {
        lo = b->center[i] - b->radius;
        hi = b->center[i] + b->radius;
      } else {
        lo = std::get<Box>(c.inner).lo[i];
        hi = std::get<Box>(c.inner).hi[i];
      }
      inside = lo > outer.lo[i] && hi < outer.hi[i];
    }
  }
  if (!inside) throw std::invalid_argument("condenser: inner plate must lie inside the outer set");
}

}  // namespace qmod
