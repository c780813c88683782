#include "qmod/orlicz.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qmod/constants.hpp"
#include "qmod/table.hpp"

namespace qmod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radii(const Exponents& e, double r0, double eps) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw std::invalid_argument("orlicz: r0 must be positive");
  if (!(eps > 0.0 && eps < r0)) throw std::invalid_argument("orlicz: need 0 < eps < r0");
  if (!e.conformal() && !(r0 < 1.0)) {
    // Dropping r^{(n-1)/(p-1)} in favour of r is only an inequality on r < 1.
    throw std::invalid_argument("orlicz: p < n requires r0 < 1");
  }
}

// log Phi(0), or log Phi(floor) when Phi(0) = 0 and a floor is configured.
std::pair<double, bool> log_upper_coefficient(const OrliczGauge& phi, const OrliczBoundOptions& opt) {
  const double tau0 = phi.at_zero();
  if (tau0 > 0.0) return {std::log(tau0), false};
  if (!opt.phi_floor_t) {
    throw std::domain_error(
        "orlicz bound: Phi(0) = 0 leaves the upper limit at zero; configure phi_floor_t");
  }
  if (!(*opt.phi_floor_t > 0.0)) throw std::invalid_argument("orlicz: phi_floor_t must be positive");
  return {std::log(phi(*opt.phi_floor_t)), true};
}

}  // namespace

double annulus_weight_beta(std::span<const double> x0, double r0) {
  const double s = r0 + norm(x0);
  return std::pow(1.0 + s * s, static_cast<double>(x0.size()));
}

AnnulusMeanReport annulus_phi_mean(const ScalarField& q, const OrliczGauge& phi,
                                   std::span<const double> x0, double eps, double r0,
                                   MassBudget m0, const VolumeOptions& opt) {
  if (!(eps > 0.0 && eps < r0)) throw std::invalid_argument("annulus_phi_mean: need 0 < eps < r0");
  const int n = static_cast<int>(x0.size());
  if (n != q.dimension()) throw std::invalid_argument("annulus_phi_mean: dimension mismatch");
  const double big_omega = unit_ball_volume(n);
  AnnulusMeanReport rep;
  const Annulus shell{Point(x0.begin(), x0.end()), eps, r0};
  const QuadratureResult r =
      integrate_over(shell, [&](std::span<const double> x) { return phi(q.value_at(x)); }, opt);
  const double vol = big_omega * (std::pow(r0, n) - std::pow(eps, n));
  rep.m_star = r.diverged ? kInf : r.value / vol;
  rep.beta = annulus_weight_beta(x0, r0);
  rep.m_star_upper = 2.0 * rep.beta * m0.value() / (big_omega * std::pow(r0, n));
  rep.valid_regime = eps <= r0 * std::pow(2.0, -1.0 / n);
  return rep;
}

double orlicz_tail_integral(const OrliczGauge& phi, const Exponents& e, double log_lo,
                            double log_hi, const AdaptiveOptions& quad) {
  if (!(log_hi > log_lo)) return 0.0;
  const double b = e.mean_power();
  auto integrand = [&](double u) {
    const double t = phi.inverse_of_exp(u);
    return t == kInf ? 0.0 : std::pow(t, -b);
  };
  const QuadratureResult r = integrate_interval(integrand, log_lo, log_hi, quad);
  return r.value / e.n();
}

OrliczBound orlicz_lower_bound(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                               std::span<const double> x0, double r0, double eps,
                               const OrliczBoundOptions& opt) {
  check_radii(e, r0, eps);
  const int n = e.n();
  if (static_cast<int>(x0.size()) != n) throw std::invalid_argument("orlicz: x0 dimension mismatch");
  if (eps > r0 * std::pow(2.0, -1.0 / n) * (1.0 + 1e-15)) {
    throw std::invalid_argument("orlicz: eps must not exceed r0 2^{-1/n}");
  }
  const auto [log_coeff, floor_used] = log_upper_coefficient(phi, opt);
  OrliczBound out;
  out.floor_used = floor_used;
  const double beta = annulus_weight_beta(x0, r0);
  out.log_lower = std::log(2.0 * beta * m0.value()) + 1.0 - std::log(unit_ball_volume(n)) -
                  n * std::log(r0);
  if (phi.at_zero() > 0.0) {
    // The annulus mean is at least Phi(0), so the lower limit is at least
    // e Phi(0); smaller budgets describe an empty class.
    out.log_lower = std::max(out.log_lower, 1.0 + std::log(phi.at_zero()));
  }
  out.log_upper = log_coeff + n * (std::log(r0) - std::log(eps));
  if (out.empty_range()) return out;
  out.value = orlicz_tail_integral(phi, e, out.log_lower, out.log_upper, opt.quadrature);
  return out;
}

double ring_integral_lower_bound(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                          std::span<const double> x0, double r0, double eps,
                          const OrliczBoundOptions& opt) {
  return orlicz_lower_bound(phi, e, m0, x0, r0, eps, opt).value;
}

double measured_mean_lower_bound(const OrliczGauge& phi, const Exponents& e, double m_star,
                                 double r0, double eps, const OrliczBoundOptions& opt) {
  check_radii(e, r0, eps);
  if (!(m_star > 0.0)) throw std::domain_error("measured bound: M* must be positive");
  if (m_star == kInf) return 0.0;
  const double log_m = std::log(m_star);
  const double lo = log_m + 1.0;
  const double hi = log_m + e.n() * (std::log(r0) - std::log(eps));
  return orlicz_tail_integral(phi, e, lo, hi, opt.quadrature);
}

std::vector<double> log_grid_down(double top, double floor, int per_decade) {
  if (!(top > 0.0 && floor > 0.0 && floor <= top) || per_decade < 1) {
    throw std::invalid_argument("log_grid_down: need 0 < floor <= top and per_decade >= 1");
  }
  std::vector<double> out;
  const double log_top = std::log10(top);
  const double log_floor = std::log10(floor);
  for (long k = 0;; ++k) {
    const double lg = log_top - static_cast<double>(k) / per_decade;
    if (lg <= log_floor + 1e-12) break;
    out.push_back(std::pow(10.0, lg));
  }
  out.push_back(floor);
  return out;
}

EpsilonStar epsilon_star(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                         std::span<const double> x0, double r0, double sigma,
                         const EpsilonStarOptions& opt) {
  if (!(sigma > 0.0)) throw std::invalid_argument("epsilon_star: sigma must be positive");
  const int n = e.n();
  EpsilonStar out;
  out.floor = r0 * opt.floor_ratio;
  const double tau0 = phi.at_zero();
  const double delta0 = tau0 > 0.0 ? std::exp(1.0) * tau0 : 1.0;
  out.divergence = divergence_diagnostic(phi, e.mean_power(), delta0, delta0).verdict;

  const std::vector<double> grid = log_grid_down(r0 * std::pow(2.0, -1.0 / n), out.floor,
                                                 opt.points_per_decade);
  auto bound = [&](std::size_t k) {
    return ring_integral_lower_bound(phi, e, m0, x0, r0, grid[k], opt.bound);
  };
  const std::size_t last = grid.size() - 1;
  out.best_bound = bound(last);
  if (out.best_bound < sigma) {
    switch (out.divergence) {
      case DivergenceVerdict::kConvergesClosedForm:
        out.reason = "divergence condition fails for exponent 1/(p-1); the bound saturates below sigma";
        break;
      case DivergenceVerdict::kDivergesClosedForm:
        out.reason = "sigma needs eps below the search floor";
        break;
      case DivergenceVerdict::kInconclusiveNumeric:
        out.reason = "sigma not reached above the floor; divergence undetermined for this gauge";
        break;
    }
    return out;
  }
  // The bound is nonincreasing in eps, i.e. nondecreasing in the grid index.
  std::size_t lo = 0;
  std::size_t hi = last;
  if (bound(0) >= sigma) {
    hi = 0;
  } else {
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      (bound(mid) >= sigma ? hi : lo) = mid;
    }
  }
  out.found = true;
  out.r_star = grid[hi];
  return out;
}

OrliczBoundCurve orlicz_bound_curve(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                                    std::span<const double> x0, double r0, double sigma,
                                    const std::vector<double>& epsilons,
                                    const OrliczBoundOptions& opt) {
  OrliczBoundCurve curve;
  curve.sigma_target = sigma;
  curve.epsilons = epsilons;
  for (double eps : epsilons) {
    curve.lower_bounds.push_back(ring_integral_lower_bound(phi, e, m0, x0, r0, eps, opt));
  }
  // Largest eps from which every smaller grid radius meets sigma.
  for (std::size_t k = curve.epsilons.size(); k-- > 0;) {
    if (curve.lower_bounds[k] < sigma) break;
    curve.r_star = curve.epsilons[k];
  }
  return curve;
}

void write_orlicz_curve(std::ostream& out, const OrliczBoundCurve& curve) {
  CsvTable table({"eps", "lower_bound", "sigma_met"});
  for (std::size_t k = 0; k < curve.epsilons.size(); ++k) {
    table.add_row({format_number(curve.epsilons[k]), format_number(curve.lower_bounds[k]),
                   curve.lower_bounds[k] >= curve.sigma_target ? "1" : "0"});
  }
  out << table.str();
}

}  // namespace qmod
