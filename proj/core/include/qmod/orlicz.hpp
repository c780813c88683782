#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmod/diagnostics.hpp"
#include "qmod/field.hpp"
#include "qmod/gauge.hpp"
#include "qmod/geometry.hpp"
#include "qmod/quadrature.hpp"

namespace qmod {

/// (1 + (r0 + |x0|)^2)^n: bounds (1 + |x|^2)^n on B(x0, r0).
double annulus_weight_beta(std::span<const double> x0, double r0);

struct AnnulusMeanReport {
  double m_star = 0.0;        // volume mean of Phi(Q) over A(x0, eps, r0); inf if divergent
  double beta = 0.0;
  double m_star_upper = 0.0;  // 2 beta M0 / (Omega_n r0^n)
  bool valid_regime = false;  // eps <= r0 2^{-1/n}
};

/// Requires 0 < eps < r0.
AnnulusMeanReport annulus_phi_mean(const ScalarField& q, const OrliczGauge& phi,
                                   std::span<const double> x0, double eps, double r0,
                                   MassBudget m0, const VolumeOptions& opt = {});

struct OrliczBoundOptions {
  /// When Phi(0) = 0 the upper limit uses Phi(floor_t) instead. Unset means
  /// such gauges are rejected.
  std::optional<double> phi_floor_t;
  AdaptiveOptions quadrature{1e-13, 25};
};

/// The Orlicz lower bound on the ring integral over (eps, r0), with its
/// integration limits kept in log form.
struct OrliczBound {
  double value = 0.0;
  double log_lower = 0.0;  // log of 2 beta M0 e / (Omega_n r0^n), or log(e Phi(0)) if larger
  double log_upper = 0.0;  // log of Phi(0) r0^n / eps^n
  bool floor_used = false;
  bool empty_range() const { return !(log_upper > log_lower); }
};

/// (1/n) * integral over (log_lo, log_hi) in u = log tau of
/// du / [Phi^{-1}(e^u)]^{1/(p-1)}.
double orlicz_tail_integral(const OrliczGauge& phi, const Exponents& e, double log_lo,
                            double log_hi, const AdaptiveOptions& quad = {1e-13, 25});

/// Lower bound on the ring integral over (eps, r0) valid for every Q meeting
/// the mass budget. Preconditions: 0 < eps <= r0 2^{-1/n}; r0 < 1 unless
/// p = n; Phi(0) > 0 or a floor is configured. Returns 0 for an empty range.
OrliczBound orlicz_lower_bound(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                               std::span<const double> x0, double r0, double eps,
                               const OrliczBoundOptions& opt = {});

/// The value of orlicz_lower_bound alone.
double ring_integral_lower_bound(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                          std::span<const double> x0, double r0, double eps,
                          const OrliczBoundOptions& opt = {});

/// Sharper variant using a measured annulus mean M*: limits e M* and
/// M* r0^n / eps^n.
double measured_mean_lower_bound(const OrliczGauge& phi, const Exponents& e, double m_star,
                                 double r0, double eps, const OrliczBoundOptions& opt = {});

/// Log-spaced radii from `top` down to `floor` inclusive, `per_decade` per
/// factor of ten.
std::vector<double> log_grid_down(double top, double floor, int per_decade);

struct EpsilonStarOptions {
  int points_per_decade = 64;
  double floor_ratio = 1e-12;  // search floor r0 * floor_ratio
  OrliczBoundOptions bound;
};

struct EpsilonStar {
  bool found = false;
  double r_star = 0.0;  // largest grid radius whose bound meets sigma
  double floor = 0.0;
  double best_bound = 0.0;  // bound at the floor
  DivergenceVerdict divergence = DivergenceVerdict::kInconclusiveNumeric;
  std::string reason;
};

/// Bisection over the log grid for the radius below which the Orlicz bound
/// stays at or above sigma.
EpsilonStar epsilon_star(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                         std::span<const double> x0, double r0, double sigma,
                         const EpsilonStarOptions& opt = {});

struct OrliczBoundCurve {
  std::vector<double> epsilons;  // decreasing
  std::vector<double> lower_bounds;
  double sigma_target = 0.0;
  std::optional<double> r_star;
};

OrliczBoundCurve orlicz_bound_curve(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                                    std::span<const double> x0, double r0, double sigma,
                                    const std::vector<double>& epsilons,
                                    const OrliczBoundOptions& opt = {});

/// Three columns "eps,lower_bound,sigma_met".
void write_orlicz_curve(std::ostream& out, const OrliczBoundCurve& curve);

}  // namespace qmod
