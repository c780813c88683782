#pragma once

#include <span>
#include <variant>
#include <vector>

namespace qmod {

using Point = std::vector<double>;

double norm(std::span<const double> x);
double distance(std::span<const double> x, std::span<const double> y);

/// Dimension n >= 2 and exponent 1 < p <= n.
class Exponents {
 public:
  Exponents(int n, double p);

  int n() const { return n_; }
  double p() const { return p_; }
  bool conformal() const { return p_ == static_cast<double>(n_); }
  /// (n-1)/(p-1), the power of r in the ring integrand.
  double radial_power() const { return (n_ - 1) / (p_ - 1.0); }
  /// 1/(p-1), the power of the spherical mean in the ring integrand.
  double mean_power() const { return 1.0 / (p_ - 1.0); }

 private:
  int n_;
  double p_;
};

/// The open annulus r1 < |x - x0| < r2.
class RingCondenser {
 public:
  RingCondenser(Point center, double r1, double r2);

  const Point& center() const { return center_; }
  double r1() const { return r1_; }
  double r2() const { return r2_; }
  int dimension() const { return static_cast<int>(center_.size()); }

 private:
  Point center_;
  double r1_;
  double r2_;
};

struct Ball {
  Point center;
  double radius = 1.0;
};

struct Annulus {
  Point center;
  double inner = 0.5;
  double outer = 1.0;
};

struct Box {
  Point lo;
  Point hi;
};

struct WholeSpace {
  int dim = 2;
};

/// Open domain descriptor. Boundaries have measure zero, so containment is
/// strict throughout.
using Domain = std::variant<WholeSpace, Ball, Annulus, Box>;

int dimension(const Domain& d);
bool contains(const Domain& d, std::span<const double> x);
/// Throws std::invalid_argument on malformed descriptors.
void validate(const Domain& d);
double volume(const Domain& d);

}  // namespace qmod
