#include "qmod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/random/sobol.hpp>

#include "qmod/constants.hpp"

namespace qmod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Accumulates the worst relative error over nested inner integrals.
struct NestState {
  double worst_rel = 0.0;
  bool unconverged = false;
  bool diverged = false;

  double take(const QuadratureResult& r) {
    if (r.diverged) diverged = true;
    if (!r.converged) unconverged = true;
    if (r.value != 0.0) worst_rel = std::max(worst_rel, r.error / std::abs(r.value));
    return r.value;
  }
};

QuadratureResult finish(double value, double error, const NestState& nest,
                        const VolumeOptions& opt) {
  QuadratureResult r;
  r.value = value;
  r.error = error + nest.worst_rel * std::abs(value);
  r.converged = !nest.unconverged && r.error <= 10.0 * opt.rel_tol * std::abs(value) + 1e-300;
  r.diverged = nest.diverged || !std::isfinite(value) ||
               (value != 0.0 && r.error > opt.divergence_ratio * std::abs(value));
  return r;
}

AdaptiveOptions level_options(const VolumeOptions& opt) {
  return {opt.rel_tol, opt.max_depth};
}

// Polar integration: integral over r in (r_in, r_out) of r^{n-1} * sphere(r).
QuadratureResult polar_adaptive(const Point& center, double r_in, double r_out,
                                const PointFunction& f, const VolumeOptions& opt) {
  const int n = static_cast<int>(center.size());
  NestState nest;
  Point x(n);
  auto radial = [&](double r) {
    auto on_sphere = [&](std::span<const double> dir) {
      for (int i = 0; i < n; ++i) x[i] = center[i] + r * dir[i];
      return f(x);
    };
    const double s = nest.take(integrate_sphere(n, on_sphere, opt));
    return std::pow(r, n - 1) * s;
  };
  const auto outer = integrate_interval(radial, r_in, r_out, level_options(opt));
  nest.take(outer);
  return finish(outer.value, outer.error, nest, opt);
}

QuadratureResult box_adaptive(const Box& b, const PointFunction& f, const VolumeOptions& opt) {
  const int n = static_cast<int>(b.lo.size());
  NestState nest;
  Point x(n);
  std::function<double(int)> level = [&](int axis) -> double {
    auto g = [&](double t) {
      x[axis] = t;
      return axis + 1 == n ? f(x) : level(axis + 1);
    };
    return nest.take(integrate_interval(g, b.lo[axis], b.hi[axis], level_options(opt)));
  };
  const double v = level(0);
  return finish(v, 0.0, nest, opt);
}

QuadratureResult qmc_box(const Box& b, const PointFunction& f, const VolumeOptions& opt) {
  const int n = static_cast<int>(b.lo.size());
  boost::random::sobol gen(static_cast<std::size_t>(n));
  const double scale = std::ldexp(1.0, -64);
  Point x(n);
  double vol = 1.0;
  for (int i = 0; i < n; ++i) vol *= b.hi[i] - b.lo[i];
  double sum = 0.0;
  double half_sum = 0.0;
  for (std::size_t k = 0; k < opt.qmc_points; ++k) {
    for (int i = 0; i < n; ++i) {
      const double u = (static_cast<double>(gen()) + 0.5) * scale;
      x[i] = b.lo[i] + u * (b.hi[i] - b.lo[i]);
    }
    sum += f(x);
    if (k + 1 == opt.qmc_points / 2) half_sum = sum;
  }
  const double est = vol * sum / static_cast<double>(opt.qmc_points);
  const double half = vol * half_sum / static_cast<double>(opt.qmc_points / 2);
  QuadratureResult r;
  r.value = est;
  r.error = std::abs(est - half);
  r.converged = true;
  r.diverged = !std::isfinite(est);
  return r;
}

// Sobol points mapped to the shell r_in < |x - c| < r_out by an equal-volume
// radial map and Gaussian-normalized directions.
QuadratureResult qmc_shell(const Point& center, double r_in, double r_out, const PointFunction& f,
                           const VolumeOptions& opt) {
  const int n = static_cast<int>(center.size());
  boost::random::sobol gen(static_cast<std::size_t>(n + 1));
  const double scale = std::ldexp(1.0, -64);
  const double a = std::pow(r_in, n);
  const double b = std::pow(r_out, n);
  Point x(n);
  Point dir(n);
  double sum = 0.0;
  double half_sum = 0.0;
  for (std::size_t k = 0; k < opt.qmc_points; ++k) {
    double len2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = (static_cast<double>(gen()) + 0.5) * scale;
      dir[i] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
      len2 += dir[i] * dir[i];
    }
    const double u = (static_cast<double>(gen()) + 0.5) * scale;
    const double r = std::pow(a + u * (b - a), 1.0 / n);
    const double inv = len2 > 0.0 ? 1.0 / std::sqrt(len2) : 0.0;
    for (int i = 0; i < n; ++i) x[i] = center[i] + r * dir[i] * inv;
    sum += f(x);
    if (k + 1 == opt.qmc_points / 2) half_sum = sum;
  }
  const double vol = unit_ball_volume(n) * (b - a);
  const double est = vol * sum / static_cast<double>(opt.qmc_points);
  const double half = vol * half_sum / static_cast<double>(opt.qmc_points / 2);
  QuadratureResult r;
  r.value = est;
  r.error = std::abs(est - half);
  r.diverged = !std::isfinite(est);
  return r;
}

}  // namespace

QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const AdaptiveOptions& opt) {
  QuadratureResult r;
  if (!(b > a)) return r;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, opt.max_depth, opt.rel_tol, &error, &l1);
  } catch (const std::exception&) {
    value = kInf;
    error = kInf;
  }
  r.value = value;
  r.error = error;
  r.diverged = !std::isfinite(value);
  r.converged = !r.diverged && error <= opt.rel_tol * std::max(l1, 1e-300) * 10.0;
  return r;
}

GaussRule gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussRule rule;
  const auto zeros = boost::math::legendre_p_zeros<double>(m);  // nonnegative zeros
  auto weight = [m](double x) {
    const double d = boost::math::legendre_p_prime<double>(m, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  if (m % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

QuadratureResult integrate_sphere(int n, const PointFunction& g, const VolumeOptions& opt) {
  if (n < 2) throw std::invalid_argument("integrate_sphere: n must be >= 2");
  NestState nest;
  Point dir(n);
  if (n == 2) {
    auto h = [&](double theta) {
      dir[0] = std::cos(theta);
      dir[1] = std::sin(theta);
      return g(dir);
    };
    const auto r = integrate_interval(h, 0.0, 2.0 * std::numbers::pi, level_options(opt));
    nest.take(r);
    return finish(r.value, r.error, nest, opt);
  }
  if (n == 3 && opt.max_adaptive_dim >= 3) {
    auto polar = [&](double phi) {
      const double s = std::sin(phi);
      const double c = std::cos(phi);
      auto azimuth = [&](double theta) {
        dir[0] = s * std::cos(theta);
        dir[1] = s * std::sin(theta);
        dir[2] = c;
        return g(dir);
      };
      return s * nest.take(integrate_interval(azimuth, 0.0, 2.0 * std::numbers::pi,
                                              level_options(opt)));
    };
    const auto r = integrate_interval(polar, 0.0, std::numbers::pi, level_options(opt));
    nest.take(r);
    return finish(r.value, r.error, nest, opt);
  }
  // Quasi-Monte-Carlo over Gaussian-normalized Sobol directions.
  boost::random::sobol gen(static_cast<std::size_t>(n));
  const double scale = std::ldexp(1.0, -64);
  double sum = 0.0;
  for (std::size_t k = 0; k < opt.qmc_points; ++k) {
    double len2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = (static_cast<double>(gen()) + 0.5) * scale;
      dir[i] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
      len2 += dir[i] * dir[i];
    }
    const double inv = 1.0 / std::sqrt(len2);
    for (int i = 0; i < n; ++i) dir[i] *= inv;
    sum += g(dir);
  }
  QuadratureResult r;
  r.value = unit_sphere_area(n) * sum / static_cast<double>(opt.qmc_points);
  r.diverged = !std::isfinite(r.value);
  return r;
}

QuadratureResult integrate_over(const Domain& d, const PointFunction& f, const VolumeOptions& opt) {
  validate(d);
  const int n = dimension(d);
  const bool adaptive = n <= opt.max_adaptive_dim;
  if (const auto* b = std::get_if<Ball>(&d)) {
    return adaptive ? polar_adaptive(b->center, 0.0, b->radius, f, opt)
                    : qmc_shell(b->center, 0.0, b->radius, f, opt);
  }
  if (const auto* a = std::get_if<Annulus>(&d)) {
    return adaptive ? polar_adaptive(a->center, a->inner, a->outer, f, opt)
                    : qmc_shell(a->center, a->inner, a->outer, f, opt);
  }
  if (const auto* b = std::get_if<Box>(&d)) {
    return adaptive ? box_adaptive(*b, f, opt) : qmc_box(*b, f, opt);
  }
  throw std::invalid_argument("integrate_over: unbounded domain");
}

std::vector<double> sobol_points(int dim, std::size_t count) {
  boost::random::sobol gen(static_cast<std::size_t>(dim));
  const double scale = std::ldexp(1.0, -64);
  std::vector<double> out(count * static_cast<std::size_t>(dim));
  for (double& v : out) v = (static_cast<double>(gen()) + 0.5) * scale;
  return out;
}

}  // namespace qmod
