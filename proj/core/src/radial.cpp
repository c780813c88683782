#include "qmod/radial.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qmod/constants.hpp"
#include "qmod/table.hpp"

namespace qmod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative offset used to probe whether a zero spherical mean is isolated.
constexpr double kZeroProbe = 1e-6;

// Endpoint samples are one-sided limits taken this far (in log r) inside the
// ring, so a support boundary on the ring edge does not leak in.
constexpr double kEdgeOffset = 1e-12;

double simpson(const std::vector<double>& f, double h) {
  const std::size_t m = f.size() - 1;
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t k = 1; k < m; ++k) (k % 2 ? odd : even) += f[k];
  return h / 3.0 * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
}

class RingIntegrand {
 public:
  RingIntegrand(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                const SphereQuadrature& quad)
      : q_(q), ring_(ring), quad_(quad), a_(e.radial_power()), b_(e.mean_power()) {}

  // Integrand in u = log r, i.e. r * (1 / (r^a q^b)). Returns nullopt-like
  // NaN when the mean vanishes on a band around r.
  double at(double r) const {
    const double q = spherical_mean(q_, ring_.center(), r, quad_).value();
    if (q > 0.0) return value(r, q);
    // Isolated zeros are removed as an improper limit; a zero band makes the
    // integral infinite.
    double acc = 0.0;
    int probes = 0;
    for (double s : {1.0 - kZeroProbe, 1.0 + kZeroProbe}) {
      const double rr = r * s;
      if (rr <= ring_.r1() || rr >= ring_.r2()) continue;
      const double qq = spherical_mean(q_, ring_.center(), rr, quad_).value();
      if (!(qq > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      acc += value(rr, qq);
      ++probes;
    }
    return probes > 0 ? acc / probes : std::numeric_limits<double>::quiet_NaN();
  }

 private:
  double value(double r, double q) const {
    if (q == kInf) return 0.0;
    return std::pow(r, 1.0 - a_) * std::pow(q, -b_);
  }

  const ScalarField& q_;
  const RingCondenser& ring_;
  const SphereQuadrature& quad_;
  double a_;
  double b_;
};

void require_dimension(int n, const SphereQuadrature& quad, const ScalarField& q) {
  if (quad.dimension() != n || q.dimension() != n) {
    throw std::invalid_argument("radial: field, ring and sphere quadrature dimensions differ");
  }
}

}  // namespace

ExtendedNonneg spherical_mean(const ScalarField& q, std::span<const double> x0, double t,
                              const SphereQuadrature& quad) {
  if (!(t > 0.0)) throw std::invalid_argument("spherical_mean: radius must be positive");
  const int n = quad.dimension();
  if (static_cast<int>(x0.size()) != n) throw std::invalid_argument("spherical_mean: dimension mismatch");
  double x[16];
  if (n > 16) throw std::invalid_argument("spherical_mean: at most 16 dimensions");
  const std::span<const double> xs(x, static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int k = 0; k < quad.node_count(); ++k) {
    const auto d = quad.direction(k);
    for (int i = 0; i < n; ++i) x[i] = x0[i] + t * d[i];
    const double v = q.value_at(xs);
    if (v == kInf) return ExtendedNonneg::infinity();
    acc += quad.weight(k) * v;
  }
  return ExtendedNonneg(std::max(0.0, acc / quad.weight_sum()));
}

RingIntegral ring_integral(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                           const SphereQuadrature& quad, const RadialOptions& opt) {
  require_dimension(ring.dimension(), quad, q);
  if (ring.dimension() != e.n()) throw std::invalid_argument("ring_integral: exponent dimension mismatch");
  if (opt.resolution < 32) throw std::invalid_argument("ring_integral: resolution must be >= 32");
  const RingIntegrand g(q, ring, e, quad);
  const double u0 = std::log(ring.r1());
  const double u1 = std::log(ring.r2());

  int m = opt.resolution + (opt.resolution % 2);
  std::vector<double> f(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    const double u = k == 0 ? u0 + kEdgeOffset : k == m ? u1 - kEdgeOffset : u0 + (u1 - u0) * k / m;
    f[k] = g.at(std::exp(u));
    if (std::isnan(f[k])) return {ExtendedNonneg::infinity(), m, true};
  }
  double prev = simpson(f, (u1 - u0) / m);
  RingIntegral out{ExtendedNonneg(prev), m, false};
  while (2 * m <= opt.max_intervals) {
    std::vector<double> next(2 * static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) next[2 * k] = f[k];
    for (int k = 0; k < m; ++k) {
      const double u = u0 + (u1 - u0) * (2 * k + 1) / (2.0 * m);
      next[2 * k + 1] = g.at(std::exp(u));
      if (std::isnan(next[2 * k + 1])) return {ExtendedNonneg::infinity(), 2 * m, true};
    }
    f.swap(next);
    m *= 2;
    const double cur = simpson(f, (u1 - u0) / m);
    out = {ExtendedNonneg(std::max(cur, 0.0)), m, false};
    if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur)) {
      out.converged = true;
      break;
    }
    prev = cur;
  }
  return out;
}

ExtendedNonneg modulus_upper_bound(ExtendedNonneg ring_integral, const Exponents& e) {
  const ExtendedNonneg omega(unit_sphere_area(e.n()));
  if (ring_integral.is_infinite()) return ExtendedNonneg{};
  return ext_div(omega, ExtendedNonneg(std::pow(ring_integral.value(), e.p() - 1.0)));
}

RadialWeight::RadialWeight(ScalarField q, RingCondenser ring, Exponents e, SphereQuadrature quad)
    : q_(std::move(q)), ring_(std::move(ring)), exps_(e), quad_(std::move(quad)) {
  require_dimension(ring_.dimension(), quad_, q_);
}

double RadialWeight::operator()(double t) const {
  if (!(t > ring_.r1() && t < ring_.r2())) return 0.0;
  const ExtendedNonneg q = spherical_mean(q_, ring_.center(), t, quad_);
  const ExtendedNonneg denom(std::pow(t, exps_.radial_power()) *
                             (q.is_infinite() ? kInf : std::pow(q.value(), exps_.mean_power())));
  return ext_div(ExtendedNonneg(1.0), denom).value();
}

double FubiniCheck::relative_gap() const { return std::abs(lhs - rhs) / std::abs(rhs); }

FubiniCheck fubini_check(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                         const SphereQuadrature& quad, const RadialOptions& opt,
                         const VolumeOptions& vol) {
  const RingIntegral I = ring_integral(q, ring, e, quad, opt);
  if (I.value.is_infinite() || I.value.is_zero()) {
    throw std::domain_error("fubini_check: ring integral must be finite and positive");
  }
  const RadialWeight psi(q, ring, e, quad);
  const int n = e.n();
  const double p = e.p();
  const Point& c = ring.center();
  Point x(n);
  // Volume integral in polar coordinates about x0. The angular factor uses
  // adaptive quadrature, independent of the sphere rule behind psi.
  auto shell = [&](double t) {
    const double w = psi(t);
    if (w == 0.0) return 0.0;
    auto on_sphere = [&](std::span<const double> dir) {
      for (int i = 0; i < n; ++i) x[i] = c[i] + t * dir[i];
      return q.value_at(x);
    };
    const double s = integrate_sphere(n, on_sphere, vol).value;
    return std::pow(t, n - 1) * std::pow(w, p) * s;
  };
  const QuadratureResult lhs =
      integrate_interval(shell, ring.r1(), ring.r2(), {vol.rel_tol, vol.max_depth + 4});
  FubiniCheck out;
  out.lhs = lhs.value;
  out.lhs_error = lhs.error;
  out.lhs_converged = lhs.converged;
  out.rhs = unit_sphere_area(n) * I.value.value();
  return out;
}

NormalizedEta::NormalizedEta(RadialWeight psi, double ring_integral)
    : psi_(std::move(psi)), total_(ring_integral) {
  if (!(total_ > 0.0) || !std::isfinite(total_)) {
    throw std::domain_error("normalized_eta: ring integral must be finite and positive");
  }
}

NormalizedEta normalized_eta(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                             const SphereQuadrature& quad, const RadialOptions& opt) {
  const RingIntegral I = ring_integral(q, ring, e, quad, opt);
  if (I.value.is_infinite() || I.value.is_zero()) {
    throw std::domain_error("normalized_eta: ring integral must be finite and positive");
  }
  return NormalizedEta(RadialWeight(q, ring, e, quad), I.value.value());
}

RadialProfile radial_profile(const ScalarField& q, const RingCondenser& ring, int count,
                             const SphereQuadrature& quad) {
  if (count < 1) throw std::invalid_argument("radial_profile: count must be positive");
  RadialProfile out;
  const double u0 = std::log(ring.r1());
  const double u1 = std::log(ring.r2());
  for (int k = 0; k < count; ++k) {
    const double t = std::exp(u0 + (u1 - u0) * (k + 0.5) / count);
    out.t.push_back(t);
    out.q.push_back(spherical_mean(q, ring.center(), t, quad));
  }
  return out;
}

void write_radial_profile(std::ostream& out, const RadialProfile& profile) {
  CsvTable table({"t", "q"});
  for (std::size_t k = 0; k < profile.t.size(); ++k) {
    table.add_row({format_number(profile.t[k]), format_number(profile.q[k].value())});
  }
  out << table.str();
}

}  // namespace qmod
