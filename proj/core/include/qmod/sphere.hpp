#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qmod {

enum class SphereScheme { kTrapezoid, kProductGauss, kMonteCarlo };

std::string_view to_string(SphereScheme s);

/// Fixed node set on the unit sphere S^{n-1}. The same directions are reused
/// for every radius, so means computed with it vary smoothly in the radius
/// even for the Monte-Carlo scheme.
class SphereQuadrature {
 public:
  /// Equal-angle trapezoid rule on the circle (n = 2).
  static SphereQuadrature trapezoid(int node_count);
  /// Gauss-Legendre in cos(polar angle) times trapezoid in azimuth (n = 3).
  /// The polar count is sqrt(node_count / 2); the azimuth count is twice that.
  static SphereQuadrature product_gauss(int node_count);
  /// Gaussian-normalized pseudo-random directions, equal weights (any n).
  static SphereQuadrature monte_carlo(int n, int node_count, std::uint64_t seed);
  /// trapezoid(256), product_gauss(2048) or monte_carlo(n, 4096, 1).
  static SphereQuadrature default_for(int n);

  int dimension() const { return dim_; }
  SphereScheme scheme() const { return scheme_; }
  int node_count() const { return static_cast<int>(weights_.size()); }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> direction(int i) const {
    return {directions_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
  }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  double weight_sum() const { return weight_sum_; }

 private:
  SphereQuadrature(int dim, SphereScheme scheme, std::uint64_t seed)
      : dim_(dim), scheme_(scheme), seed_(seed) {}
  void finalize();

  int dim_;
  SphereScheme scheme_;
  std::uint64_t seed_ = 0;
  std::vector<double> directions_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
};

}  // namespace qmod
