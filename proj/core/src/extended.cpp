#include "qmod/extended.hpp"

#include <cmath>
#include <stdexcept>

namespace qmod {

ExtendedNonneg::ExtendedNonneg(double v) : value_(v) {
  if (std::isnan(v) || v < 0.0) {
    throw std::invalid_argument("ExtendedNonneg: value must be >= 0");
  }
}

ExtendedNonneg ext_div(ExtendedNonneg a, ExtendedNonneg b) {
  if (a.is_infinite() && b.is_infinite()) {
    throw std::domain_error("ext_div: inf/inf is undefined");
  }
  if (b.is_infinite()) return ExtendedNonneg{};
  if (b.is_zero()) {
    return a.is_zero() ? ExtendedNonneg{} : ExtendedNonneg::infinity();
  }
  if (a.is_infinite()) return ExtendedNonneg::infinity();
  return ExtendedNonneg(a.value() / b.value());
}

ExtendedNonneg ext_pow(ExtendedNonneg a, double exponent) {
  if (!(exponent > 0.0)) {
    throw std::invalid_argument("ext_pow: exponent must be positive");
  }
  if (a.is_infinite()) return a;
  return ExtendedNonneg(std::pow(a.value(), exponent));
}

}  // namespace qmod
