#pragma once

#include <string_view>

#include "qmod/extended.hpp"
#include "qmod/field.hpp"
#include "qmod/gauge.hpp"
#include "qmod/quadrature.hpp"

namespace qmod {

class MassBudget {
 public:
  explicit MassBudget(double m0);
  double value() const { return m0_; }

 private:
  double m0_;
};

struct MassCheck {
  ExtendedNonneg integral;
  bool satisfied = false;
  double error_estimate = 0.0;
  bool diverged = false;
};

/// Weighted Orlicz mass: integral over D of Phi(Q(x)) (1 + |x|^2)^{-n} dm(x),
/// compared with the budget. A divergent quadrature reports +inf.
MassCheck verify_mass_bound(const ScalarField& q, const OrliczGauge& phi, const Domain& d,
                            MassBudget m0, const VolumeOptions& opt = {});

enum class DivergenceVerdict { kDivergesClosedForm, kConvergesClosedForm, kInconclusiveNumeric };

std::string_view to_string(DivergenceVerdict v);

struct DivergenceReport {
  double partial_integral = 0.0;
  DivergenceVerdict verdict = DivergenceVerdict::kInconclusiveNumeric;
};

/// Integral of d tau / (tau [Phi^{-1}(tau)]^q) from delta0. Catalog gauges get
/// an analytic verdict; tabulated gauges only the partial integral to the
/// horizon. Throws std::domain_error unless delta0 > Phi(0) and q > 0.
DivergenceReport divergence_diagnostic(const OrliczGauge& phi, double q, double delta0,
                                       double horizon);

}  // namespace qmod
