#pragma once

#include <string>
#include <variant>
#include <vector>

namespace qmod {

/// Phi(t) = e^t.
struct ExponentialGauge {};

/// Phi(t) = e^{t^beta}; convex only for beta >= 1.
struct PowerExponentialGauge {
  double beta = 1.0;
};

/// Phi(t) = (1 + t)^alpha, alpha >= 1.
struct PowerGauge {
  double alpha = 1.0;
};

/// Piecewise-linear gauge through (t_i, Phi_i) with t_0 = 0, extended past the
/// last sample with the last slope. Construction rejects samples that are not
/// strictly increasing or not discretely convex.
class TabulatedGauge {
 public:
  TabulatedGauge(std::vector<double> t, std::vector<double> phi);

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& phi() const { return phi_; }

  double operator()(double t) const;

 private:
  std::vector<double> t_;
  std::vector<double> phi_;
};

/// Strictly increasing convex Orlicz gauge Phi: [0, inf] -> [0, inf].
class OrliczGauge {
 public:
  using Kind = std::variant<ExponentialGauge, PowerExponentialGauge, PowerGauge, TabulatedGauge>;

  explicit OrliczGauge(Kind kind);

  const Kind& kind() const { return kind_; }
  bool is_catalog() const { return !std::holds_alternative<TabulatedGauge>(kind_); }
  std::string describe() const;

  /// Phi(t) for t in [0, inf]; Phi(inf) = inf.
  double operator()(double t) const;
  /// Phi(0), often written tau_0.
  double at_zero() const;
  /// Solves Phi(t) = tau. Throws std::domain_error for tau < Phi(0).
  double inverse(double tau) const;
  /// Phi^{-1}(e^u), evaluated without forming e^u where the closed form allows
  /// (the Orlicz integrals run far past the double range in tau).
  double inverse_of_exp(double u) const;

 private:
  Kind kind_;
};

inline double gauge_inverse(const OrliczGauge& phi, double tau) { return phi.inverse(tau); }

}  // namespace qmod
