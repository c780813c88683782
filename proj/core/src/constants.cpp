#include "qmod/constants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmod {
namespace {

void require_dimension(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
}

}  // namespace

double unit_sphere_area(int n) {
  require_dimension(n);
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double unit_ball_volume(int n) {
  require_dimension(n);
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

DimensionalConstants DimensionalConstants::of(int n) {
  return {n, unit_sphere_area(n), unit_ball_volume(n)};
}

}  // namespace qmod
