#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmod/diagnostics.hpp"
#include "qmod/gauge.hpp"
#include "qmod/geometry.hpp"
#include "qmod/orlicz.hpp"

namespace qmod {

enum class CertificateKind { kCapacityDecay, kDiameterBound };

std::string to_string(CertificateKind k);

/// Raised when no grid radius yields a usable bound.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CertificateInputs {
  std::string gauge;
  int n = 0;
  double p = 0.0;
  double m0 = 0.0;
  Point x0;
  double r0 = 0.0;
  std::optional<double> b_n;
};

/// Log-spaced radii starting at r0 2^{-1/n}.
struct CertificateGrid {
  int points_per_decade = 64;
  int decades = 6;
};

std::vector<double> certificate_grid(double r0, int n, const CertificateGrid& grid = {});

/// Maps a capacity level to a chordal radius: the smallest a_i with
/// delta(a_i) > level, or 1 when no entry qualifies.
class DeltaTable {
 public:
  /// a strictly increasing in (0, 1]; delta nonnegative.
  DeltaTable(std::vector<double> a, std::vector<double> delta);
  double modulus_for(double capacity_bound) const;

 private:
  std::vector<double> a_;
  std::vector<double> delta_;
};

struct Certificate {
  CertificateKind kind = CertificateKind::kCapacityDecay;
  CertificateInputs inputs;
  std::vector<double> epsilons;  // decreasing
  std::vector<double> bounds;    // +inf where the grid radius gives no information
  std::vector<std::string> provenance;
  DivergenceVerdict divergence = DivergenceVerdict::kInconclusiveNumeric;

  /// Capacity-decay certificates with a delta table.
  std::vector<double> chordal_modulus;

  /// Diameter certificates: intermediate stages per grid radius.
  std::vector<double> alpha;
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  std::optional<double> eps1;
  double alpha1_min = 0.0;
  bool stage1_failed = false;

  std::size_t finite_points() const;
};

/// Upper bound on cap_p f(B(x0, r0), closed B(x0, eps)) over the mapping class:
/// omega_{n-1} / I^{p-1} with I the Orlicz lower bound on the ring integral.
/// Throws CertificateError if every grid radius gives no information.
Certificate capacity_decay_certificate(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                                       const Point& x0, double r0,
                                       const std::vector<double>& epsilons,
                                       const std::optional<DeltaTable>& delta = std::nullopt,
                                       const OrliczBoundOptions& opt = {});

/// Upper bound alpha3(eps) on the Euclidean diameter of f(closed B(x0, eps))
/// for n - 1 < p < n. A failed first stage is reported in the certificate
/// (stage1_failed, alpha1_min) with an empty curve rather than thrown.
Certificate diameter_certificate(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                                 const Point& x0, double r0, double b_n,
                                 const std::vector<double>& epsilons,
                                 const OrliczBoundOptions& opt = {});

/// "# key=value" header lines followed by the curve as CSV.
void write_certificate(std::ostream& out, const Certificate& cert);

/// One CSV header line and one record summarizing the certificate.
std::string certificate_summary(const Certificate& cert);

}  // namespace qmod
