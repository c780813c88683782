#include "qmod/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmod {

MassBudget::MassBudget(double m0) : m0_(m0) {
  if (!(m0 > 0.0) || !std::isfinite(m0)) throw std::invalid_argument("mass budget must be in (0, inf)");
}

MassCheck verify_mass_bound(const ScalarField& q, const OrliczGauge& phi, const Domain& d,
                            MassBudget m0, const VolumeOptions& opt) {
  const int n = dimension(d);
  if (n != q.dimension()) throw std::invalid_argument("verify_mass_bound: dimension mismatch");
  auto integrand = [&](std::span<const double> x) {
    const double r2 = [&] {
      double s = 0.0;
      for (double c : x) s += c * c;
      return s;
    }();
    return phi(q.value_at(x)) / std::pow(1.0 + r2, n);
  };
  const QuadratureResult r = integrate_over(d, integrand, opt);
  MassCheck out;
  out.error_estimate = r.error;
  if (r.diverged) {
    out.diverged = true;
    out.integral = ExtendedNonneg::infinity();
    out.satisfied = false;
    return out;
  }
  out.integral = ExtendedNonneg(std::max(r.value, 0.0));
  out.satisfied = out.integral.value() <= m0.value();
  return out;
}

std::string_view to_string(DivergenceVerdict v) {
  switch (v) {
    case DivergenceVerdict::kDivergesClosedForm: return "diverges-closed-form";
    case DivergenceVerdict::kConvergesClosedForm: return "converges-closed-form";
    case DivergenceVerdict::kInconclusiveNumeric: return "inconclusive-numeric";
  }
  return "unknown";
}

DivergenceReport divergence_diagnostic(const OrliczGauge& phi, double q, double delta0,
                                       double horizon) {
  if (!(q > 0.0)) throw std::domain_error("divergence_diagnostic: exponent must be positive");
  if (!(delta0 > phi.at_zero())) throw std::domain_error("divergence_diagnostic: need delta0 > Phi(0)");
  DivergenceReport rep;
  if (horizon > delta0) {
    // tau = e^u turns d tau / tau into du.
    auto integrand = [&](double u) { return std::pow(phi.inverse(std::exp(u)), -q); };
    rep.partial_integral =
        integrate_interval(integrand, std::log(delta0), std::log(horizon), {1e-10, 20}).value;
  }
  if (std::holds_alternative<ExponentialGauge>(phi.kind())) {
    // Phi^{-1}(tau) = log tau: integrand 1/(tau (log tau)^q).
    rep.verdict = q <= 1.0 ? DivergenceVerdict::kDivergesClosedForm
                           : DivergenceVerdict::kConvergesClosedForm;
  } else if (const auto* g = std::get_if<PowerExponentialGauge>(&phi.kind())) {
    // Phi^{-1}(tau) = (log tau)^{1/beta}: integrand 1/(tau (log tau)^{q/beta}).
    rep.verdict = q / g->beta <= 1.0 ? DivergenceVerdict::kDivergesClosedForm
                                     : DivergenceVerdict::kConvergesClosedForm;
  } else if (std::holds_alternative<PowerGauge>(phi.kind())) {
    // Phi^{-1}(tau) ~ tau^{1/alpha}: integrand ~ tau^{-1-q/alpha}.
    rep.verdict = DivergenceVerdict::kConvergesClosedForm;
  } else {
    rep.verdict = DivergenceVerdict::kInconclusiveNumeric;
  }
  return rep;
}

}  // namespace qmod
