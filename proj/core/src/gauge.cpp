#include "qmod/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace qmod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TabulatedGauge::TabulatedGauge(std::vector<double> t, std::vector<double> phi)
    : t_(std::move(t)), phi_(std::move(phi)) {
  if (t_.size() < 2 || t_.size() != phi_.size()) {
    throw std::invalid_argument("tabulated gauge: need >= 2 paired samples");
  }
  if (t_.front() != 0.0) throw std::invalid_argument("tabulated gauge: first abscissa must be 0");
  if (!(phi_.front() >= 0.0)) throw std::invalid_argument("tabulated gauge: Phi(0) must be >= 0");
  double prev_slope = 0.0;
  for (std::size_t i = 1; i < t_.size(); ++i) {
    if (!(t_[i] > t_[i - 1])) throw std::invalid_argument("tabulated gauge: abscissae not increasing");
    if (!(phi_[i] > phi_[i - 1])) throw std::invalid_argument("tabulated gauge: values not increasing");
    const double slope = (phi_[i] - phi_[i - 1]) / (t_[i] - t_[i - 1]);
    if (i > 1 && slope < prev_slope * (1.0 - 1e-12)) {
      throw std::invalid_argument("tabulated gauge: samples are not convex");
    }
    prev_slope = slope;
  }
}

double TabulatedGauge::operator()(double t) const {
  if (t >= t_.back()) {
    const std::size_t k = t_.size() - 1;
    const double slope = (phi_[k] - phi_[k - 1]) / (t_[k] - t_[k - 1]);
    return phi_[k] + slope * (t - t_[k]);
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - t_.begin());
  const double w = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
  return phi_[k - 1] + w * (phi_[k] - phi_[k - 1]);
}

OrliczGauge::OrliczGauge(Kind kind) : kind_(std::move(kind)) {
  if (const auto* g = std::get_if<PowerExponentialGauge>(&kind_); g && !(g->beta >= 1.0)) {
    throw std::invalid_argument("power-exponential gauge needs beta >= 1 for convexity");
  }
  if (const auto* g = std::get_if<PowerGauge>(&kind_); g && !(g->alpha >= 1.0)) {
    throw std::invalid_argument("power gauge needs alpha >= 1");
  }
}

std::string OrliczGauge::describe() const {
  std::ostringstream s;
  s.precision(17);
  if (std::holds_alternative<ExponentialGauge>(kind_)) s << "exponential";
  if (const auto* g = std::get_if<PowerExponentialGauge>(&kind_)) s << "power-exponential(beta=" << g->beta << ")";
  if (const auto* g = std::get_if<PowerGauge>(&kind_)) s << "power(alpha=" << g->alpha << ")";
  if (const auto* g = std::get_if<TabulatedGauge>(&kind_)) s << "tabulated(" << g->t().size() << " samples)";
  return s.str();
}

double OrliczGauge::operator()(double t) const {
  if (std::isnan(t) || t < 0.0) throw std::domain_error("gauge argument must be >= 0");
  if (t == kInf) return kInf;
  struct {
    double t;
    double operator()(const ExponentialGauge&) const { return std::exp(t); }
    double operator()(const PowerExponentialGauge& g) const { return std::exp(std::pow(t, g.beta)); }
    double operator()(const PowerGauge& g) const { return std::pow(1.0 + t, g.alpha); }
    double operator()(const TabulatedGauge& g) const { return g(t); }
  } visitor{t};
  return std::visit(visitor, kind_);
}

double OrliczGauge::at_zero() const { return (*this)(0.0); }

double OrliczGauge::inverse(double tau) const {
  const double tau0 = at_zero();
  if (std::isnan(tau) || tau < tau0) throw std::domain_error("gauge inverse: tau below Phi(0)");
  if (tau == kInf) return kInf;
  if (tau == tau0) return 0.0;
  if (std::holds_alternative<ExponentialGauge>(kind_)) return std::log(tau);
  if (const auto* g = std::get_if<PowerExponentialGauge>(&kind_)) {
    return std::pow(std::log(tau), 1.0 / g->beta);
  }
  if (const auto* g = std::get_if<PowerGauge>(&kind_)) return std::pow(tau, 1.0 / g->alpha) - 1.0;

  const auto& tab = std::get<TabulatedGauge>(kind_);
  // Bracket: grow the upper end until Phi exceeds tau, then bisect.
  double hi = std::max(tab.t().back(), 1.0);
  while (tab(hi) < tau) hi *= 2.0;
  auto residual = [&](double t) { return tab(t) - tau; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::bisect(residual, 0.0, hi, tol, iters);
  return 0.5 * (a + b);
}

double OrliczGauge::inverse_of_exp(double u) const {
  if (std::holds_alternative<ExponentialGauge>(kind_)) {
    if (u < 0.0) throw std::domain_error("gauge inverse: tau below Phi(0)");
    return u;
  }
  if (const auto* g = std::get_if<PowerExponentialGauge>(&kind_)) {
    if (u < 0.0) throw std::domain_error("gauge inverse: tau below Phi(0)");
    return std::pow(u, 1.0 / g->beta);
  }
  if (const auto* g = std::get_if<PowerGauge>(&kind_)) {
    if (u < 0.0) throw std::domain_error("gauge inverse: tau below Phi(0)");
    return std::expm1(u / g->alpha);
  }
  return inverse(std::exp(u));
}

}  // namespace qmod
