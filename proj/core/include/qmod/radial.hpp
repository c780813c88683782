#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "qmod/extended.hpp"
#include "qmod/field.hpp"
#include "qmod/geometry.hpp"
#include "qmod/quadrature.hpp"
#include "qmod/sphere.hpp"

namespace qmod {

struct RadialOptions {
  /// Initial number of Simpson intervals on the log-spaced radial grid.
  int resolution = 64;
  double rel_tol = 1e-8;
  int max_intervals = 1 << 18;
};

/// Mean of Q over the sphere S(x0, t) with respect to surface measure.
ExtendedNonneg spherical_mean(const ScalarField& q, std::span<const double> x0, double t,
                              const SphereQuadrature& quad);

struct RingIntegral {
  ExtendedNonneg value;
  int intervals = 0;
  bool converged = false;
};

/// I = integral over (r1, r2) of dr / (r^{(n-1)/(p-1)} q(r)^{1/(p-1)}), by
/// composite Simpson in log r with interval doubling. A radius band where the
/// spherical mean vanishes makes I infinite.
RingIntegral ring_integral(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                           const SphereQuadrature& quad, const RadialOptions& opt = {});

/// omega_{n-1} / I^{p-1}, with I = inf giving 0 and I = 0 giving inf. Bounds
/// both the image ring modulus and the image condenser capacity.
ExtendedNonneg modulus_upper_bound(ExtendedNonneg ring_integral, const Exponents& e);

/// psi(t) = 1 / (t^{(n-1)/(p-1)} q(t)^{1/(p-1)}) on (r1, r2), zero elsewhere.
class RadialWeight {
 public:
  RadialWeight(ScalarField q, RingCondenser ring, Exponents e, SphereQuadrature quad);
  double operator()(double t) const;
  const RingCondenser& ring() const { return ring_; }
  const Exponents& exponents() const { return exps_; }

 private:
  ScalarField q_;
  RingCondenser ring_;
  Exponents exps_;
  SphereQuadrature quad_;
};

struct FubiniCheck {
  double lhs = 0.0;  // integral over the ring of Q psi^p by volume quadrature
  double rhs = 0.0;  // omega_{n-1} * I
  double lhs_error = 0.0;
  bool lhs_converged = false;

  double relative_gap() const;
};

/// Requires 0 < I < inf (std::domain_error otherwise).
FubiniCheck fubini_check(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                         const SphereQuadrature& quad, const RadialOptions& opt = {},
                         const VolumeOptions& vol = {});

/// eta(t) = psi(t) / I, which integrates to 1 over (r1, r2).
class NormalizedEta {
 public:
  NormalizedEta(RadialWeight psi, double ring_integral);
  double operator()(double t) const { return psi_(t) / total_; }
  double ring_integral() const { return total_; }
  const RingCondenser& ring() const { return psi_.ring(); }

 private:
  RadialWeight psi_;
  double total_;
};

/// Throws std::domain_error when I is 0 or infinite.
NormalizedEta normalized_eta(const ScalarField& q, const RingCondenser& ring, const Exponents& e,
                             const SphereQuadrature& quad, const RadialOptions& opt = {});

struct RadialProfile {
  std::vector<double> t;
  std::vector<ExtendedNonneg> q;
};

/// Spherical means on `count` log-spaced radii strictly inside (r1, r2).
RadialProfile radial_profile(const ScalarField& q, const RingCondenser& ring, int count,
                             const SphereQuadrature& quad);

/// Two columns "t,q" with a header row.
void write_radial_profile(std::ostream& out, const RadialProfile& profile);

}  // namespace qmod
