#include "qmod/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmod/constants.hpp"

namespace qmod {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Exponents::Exponents(int n, double p) : n_(n), p_(p) {
  if (n < 2) throw std::invalid_argument("Exponents: n must be >= 2");
  if (!(p > 1.0) || p > static_cast<double>(n)) {
    throw std::invalid_argument("Exponents: p must satisfy 1 < p <= n");
  }
}

RingCondenser::RingCondenser(Point center, double r1, double r2)
    : center_(std::move(center)), r1_(r1), r2_(r2) {
  if (center_.size() < 2) {
    throw std::invalid_argument("RingCondenser: center must have >= 2 coordinates");
  }
  for (double c : center_) {
    if (!std::isfinite(c)) throw std::invalid_argument("RingCondenser: center not finite");
  }
  if (!(r1 > 0.0) || !(r2 > r1) || !std::isfinite(r2)) {
    throw std::invalid_argument("RingCondenser: need 0 < r1 < r2 < inf");
  }
}

int dimension(const Domain& d) {
  struct {
    int operator()(const WholeSpace& w) const { return w.dim; }
    int operator()(const Ball& b) const { return static_cast<int>(b.center.size()); }
    int operator()(const Annulus& a) const { return static_cast<int>(a.center.size()); }
    int operator()(const Box& b) const { return static_cast<int>(b.lo.size()); }
  } visitor;
  return std::visit(visitor, d);
}

bool contains(const Domain& d, std::span<const double> x) {
  struct {
    std::span<const double> x;
    bool operator()(const WholeSpace&) const { return true; }
    bool operator()(const Ball& b) const { return distance(x, b.center) < b.radius; }
    bool operator()(const Annulus& a) const {
      const double r = distance(x, a.center);
      return r > a.inner && r < a.outer;
    }
    bool operator()(const Box& b) const {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return false;
      }
      return true;
    }
  } visitor{x};
  return std::visit(visitor, d);
}

void validate(const Domain& d) {
  const int n = dimension(d);
  if (n < 2) throw std::invalid_argument("domain dimension must be >= 2");
  if (const auto* b = std::get_if<Ball>(&d); b && !(b->radius > 0.0)) {
    throw std::invalid_argument("ball radius must be positive");
  }
  if (const auto* a = std::get_if<Annulus>(&d); a && !(a->inner > 0.0 && a->outer > a->inner)) {
    throw std::invalid_argument("annulus needs 0 < inner < outer");
  }
  if (const auto* b = std::get_if<Box>(&d)) {
    if (b->hi.size() != b->lo.size()) throw std::invalid_argument("box corners differ in dimension");
    for (std::size_t i = 0; i < b->lo.size(); ++i) {
      if (!(b->hi[i] > b->lo[i])) throw std::invalid_argument("box needs lo < hi on every axis");
    }
  }
}

double volume(const Domain& d) {
  if (const auto* b = std::get_if<Ball>(&d)) {
    const int n = static_cast<int>(b->center.size());
    return unit_ball_volume(n) * std::pow(b->radius, n);
  }
  if (const auto* a = std::get_if<Annulus>(&d)) {
    const int n = static_cast<int>(a->center.size());
    return unit_ball_volume(n) * (std::pow(a->outer, n) - std::pow(a->inner, n));
  }
  if (const auto* b = std::get_if<Box>(&d)) {
    double v = 1.0;
    for (std::size_t i = 0; i < b->lo.size(); ++i) v *= b->hi[i] - b->lo[i];
    return v;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace qmod
