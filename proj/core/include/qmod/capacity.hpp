#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "qmod/field.hpp"
#include "qmod/geometry.hpp"

namespace qmod {

/// p-capacity of the round ring (B(x0, r2), closed B(x0, r1)). r2 may be
/// +inf when p < n.
double ring_capacity_exact(double r1, double r2, const Exponents& e);
double ring_capacity_exact(const RingCondenser& ring, const Exponents& e);

/// Volume lower bound n Omega_n^{p/n} ((n-p)/(p-1))^{p-1} m(C)^{(n-p)/n}.
/// Requires 1 < p < n (std::domain_error otherwise).
double mazya_lower_bound(double measure_c, const Exponents& e);

/// Diameter lower bound (b_n d(C)^p / m(A)^{1-n+p})^{1/(n-1)}, p > n - 1.
double kruglikov_lower_bound(double diameter_c, double measure_a, const Exponents& e, double b_n);

/// Largest b_n for which the diameter bound does not exceed `capacity`.
double calibrate_kruglikov_constant(double capacity, double diameter_c, double measure_a,
                                    const Exponents& e);

/// Region of a condenser plate: a ball or an axis-aligned box. Boxes may be
/// degenerate (zero width on some axes) when used as the compact plate.
using Region = std::variant<Ball, Box>;

/// Open set A with compact C inside it.
struct Condenser {
  Region outer;
  Region inner;
};

int dimension(const Region& r);
double measure(const Region& r);
double diameter(const Region& r);
/// Throws std::invalid_argument unless the closed inner plate lies in the
/// open outer set.
void validate(const Condenser& c);

/// How the plates are imposed on lattice nodes.
enum class PlateMask {
  /// Nodes inside closed C are 1, nodes outside open A are 0.
  kNodeMembership,
  /// Every simplex meeting C is 1 and every simplex leaving A is 0. The
  /// potential is then admissible, so the energy is an upper bound.
  kConforming,
};

struct DiscreteCapacityOptions {
  /// Cells along the longest axis of the outer set's bounding box.
  int resolution = 64;
  double rel_energy_tol = 1e-9;
  int stall_window = 10;
  int max_iterations = 20000;
  /// Regularization of |grad u|^p as (|grad u|^2 + mu)^{p/2}.
  double mu = 1e-12;
  /// Start from a solve at half resolution (recursively, down to 16 cells).
  bool nested = true;
  int jobs = 1;
  PlateMask mask = PlateMask::kNodeMembership;
};

/// Minimizer of the discrete p-Dirichlet energy on a uniform Kuhn
/// triangulation with piecewise-linear potentials.
struct GridSolution {
  Point lo;
  double spacing = 0.0;
  std::vector<std::size_t> counts;  // nodes per axis
  std::vector<double> potential;    // row-major, last axis fastest
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double wall_seconds = 0.0;
  int resolution = 0;

  GridField as_field() const;
};

/// Throws std::domain_error if the plates are not separated at this
/// resolution.
GridSolution discrete_p_capacity(const Condenser& cond, const Exponents& e,
                                 const DiscreteCapacityOptions& opt = {});

}  // namespace qmod
