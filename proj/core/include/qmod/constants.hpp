#pragma once

namespace qmod {

/// Surface area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

/// Volume of the unit ball in R^n: pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

struct DimensionalConstants {
  int n = 2;
  double omega = 0.0;      // area of S^{n-1}
  double big_omega = 0.0;  // volume of B^n

  static DimensionalConstants of(int n);
};

}  // namespace qmod
