#pragma once

#include <compare>
#include <limits>

namespace qmod {

/// A value in [0, +inf]. Infinity is the host floating-point infinity and
/// orders above every finite value.
class ExtendedNonneg {
 public:
  constexpr ExtendedNonneg() = default;

  /// Throws std::invalid_argument for negative or NaN input.
  explicit ExtendedNonneg(double v);

  static constexpr ExtendedNonneg infinity() {
    ExtendedNonneg r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  constexpr double value() const { return value_; }
  constexpr bool is_infinite() const {
    return value_ == std::numeric_limits<double>::infinity();
  }
  constexpr bool is_finite() const { return !is_infinite(); }
  constexpr bool is_zero() const { return value_ == 0.0; }

  friend constexpr auto operator<=>(ExtendedNonneg, ExtendedNonneg) = default;

 private:
  double value_ = 0.0;
};

/// Division with the conventions a/inf = 0, a/0 = inf for a > 0, and 0/0 = 0.
/// inf/inf is rejected with std::domain_error.
ExtendedNonneg ext_div(ExtendedNonneg a, ExtendedNonneg b);

/// Power a^e for e > 0 with inf^e = inf.
ExtendedNonneg ext_pow(ExtendedNonneg a, double exponent);

}  // namespace qmod
