#include "qmod/sphere.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qmod/constants.hpp"
#include "qmod/quadrature.hpp"

namespace qmod {

std::string_view to_string(SphereScheme s) {
  switch (s) {
    case SphereScheme::kTrapezoid: return "trapezoid";
    case SphereScheme::kProductGauss: return "product-gauss";
    case SphereScheme::kMonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

void SphereQuadrature::finalize() {
  weight_sum_ = 0.0;
  for (double w : weights_) weight_sum_ += w;
}

SphereQuadrature SphereQuadrature::trapezoid(int node_count) {
  if (node_count < 16) throw std::invalid_argument("sphere quadrature needs >= 16 nodes");
  SphereQuadrature q(2, SphereScheme::kTrapezoid, 0);
  const double step = 2.0 * std::numbers::pi / node_count;
  for (int k = 0; k < node_count; ++k) {
    q.directions_.push_back(std::cos(k * step));
    q.directions_.push_back(std::sin(k * step));
    q.weights_.push_back(step);
  }
  q.finalize();
  return q;
}

SphereQuadrature SphereQuadrature::product_gauss(int node_count) {
  if (node_count < 16) throw std::invalid_argument("sphere quadrature needs >= 16 nodes");
  const int polar = std::max(3, static_cast<int>(std::lround(std::sqrt(node_count / 2.0))));
  const int azimuth = 2 * polar;
  const GaussRule rule = gauss_legendre(polar);
  SphereQuadrature q(3, SphereScheme::kProductGauss, 0);
  const double step = 2.0 * std::numbers::pi / azimuth;
  for (int i = 0; i < polar; ++i) {
    const double c = rule.nodes[i];
    const double s = std::sqrt(1.0 - c * c);
    for (int k = 0; k < azimuth; ++k) {
      // Half-step azimuth offset keeps nodes off the coordinate planes.
      const double theta = (k + 0.5) * step;
      q.directions_.push_back(s * std::cos(theta));
      q.directions_.push_back(s * std::sin(theta));
      q.directions_.push_back(c);
      q.weights_.push_back(rule.weights[i] * step);
    }
  }
  q.finalize();
  return q;
}

SphereQuadrature SphereQuadrature::monte_carlo(int n, int node_count, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sphere dimension must be >= 2");
  if (node_count < 16) throw std::invalid_argument("sphere quadrature needs >= 16 nodes");
  SphereQuadrature q(n, SphereScheme::kMonteCarlo, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double w = unit_sphere_area(n) / node_count;
  std::vector<double> v(n);
  for (int k = 0; k < node_count; ++k) {
    double len2 = 0.0;
    do {
      len2 = 0.0;
      for (double& c : v) {
        c = gauss(rng);
        len2 += c * c;
      }
    } while (len2 == 0.0);
    const double inv = 1.0 / std::sqrt(len2);
    for (double c : v) q.directions_.push_back(c * inv);
    q.weights_.push_back(w);
  }
  q.finalize();
  return q;
}

SphereQuadrature SphereQuadrature::default_for(int n) {
  if (n == 2) return trapezoid(256);
  if (n == 3) return product_gauss(2048);
  return monte_carlo(n, 4096, 1);
}

}  // namespace qmod
