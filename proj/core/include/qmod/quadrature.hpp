#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qmod/geometry.hpp"

namespace qmod {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  /// Set when the estimate is not finite or the error estimate is a sizable
  /// fraction of the value; callers treat this as a non-integrable integrand.
  bool diverged = false;
};

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  unsigned max_depth = 15;
};

/// Adaptive Gauss-Kronrod (7/15) on a finite interval.
QuadratureResult integrate_interval(const std::function<double(double)>& f, double a,
                                    double b, const AdaptiveOptions& opt = {});

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int m);

struct VolumeOptions {
  double rel_tol = 1e-8;
  /// Depth cap for every nested adaptive level.
  unsigned max_depth = 10;
  /// Dimensions above this use quasi-Monte-Carlo.
  int max_adaptive_dim = 3;
  std::size_t qmc_points = std::size_t{1} << 20;
  /// Relative error beyond which a result is flagged as diverged.
  double divergence_ratio = 1e-3;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Integral of f over a ball, annulus or box. Balls and annuli use polar
/// coordinates about their center; boxes use Cartesian nesting.
QuadratureResult integrate_over(const Domain& d, const PointFunction& f,
                                const VolumeOptions& opt = {});

/// Integral over the unit sphere S^{n-1} of g(direction) with respect to surface
/// measure.
QuadratureResult integrate_sphere(int n, const PointFunction& g, const VolumeOptions& opt = {});

/// Deterministic Sobol points in [0,1)^dim, row-major (count x dim).
std::vector<double> sobol_points(int dim, std::size_t count);

}  // namespace qmod
