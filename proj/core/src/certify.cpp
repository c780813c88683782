#include "qmod/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "qmod/constants.hpp"
#include "qmod/table.hpp"

namespace qmod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CertificateInputs make_inputs(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                              const Point& x0, double r0) {
  CertificateInputs in;
  in.gauge = phi.describe();
  in.n = e.n();
  in.p = e.p();
  in.m0 = m0.value();
  in.x0 = x0;
  in.r0 = r0;
  return in;
}

// omega_{n-1} / I^{p-1} for the Orlicz lower bound I over (eps, r0); +inf when
// eps is outside the valid regime or the range of integration is empty.
double ring_capacity_bound(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                           const Point& x0, double r0, double eps, const OrliczBoundOptions& opt) {
  if (!(eps < r0) || eps > r0 * std::pow(2.0, -1.0 / e.n()) * (1.0 + 1e-15)) return kInf;
  const OrliczBound b = orlicz_lower_bound(phi, e, m0, x0, r0, eps, opt);
  if (b.empty_range() || !(b.value > 0.0)) return kInf;
  return unit_sphere_area(e.n()) / std::pow(b.value, e.p() - 1.0);
}

DivergenceVerdict divergence_of(const OrliczGauge& phi, const Exponents& e) {
  const double tau0 = phi.at_zero();
  const double delta0 = tau0 > 0.0 ? std::exp(1.0) * tau0 : 1.0;
  return divergence_diagnostic(phi, e.mean_power(), delta0, delta0).verdict;
}

void check_grid(const std::vector<double>& eps) {
  if (eps.empty()) throw std::invalid_argument("certificate: empty radius grid");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw std::invalid_argument("certificate: radii must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw std::invalid_argument("certificate: radii must be strictly decreasing");
    }
  }
}

}  // namespace

std::string to_string(CertificateKind k) {
  return k == CertificateKind::kCapacityDecay ? "capacity-decay" : "diameter-bound";
}

std::vector<double> certificate_grid(double r0, int n, const CertificateGrid& grid) {
  if (grid.decades < 1) throw std::invalid_argument("certificate grid: decades must be >= 1");
  const double top = r0 * std::pow(2.0, -1.0 / n);
  return log_grid_down(top, top * std::pow(10.0, -grid.decades), grid.points_per_decade);
}

DeltaTable::DeltaTable(std::vector<double> a, std::vector<double> delta)
    : a_(std::move(a)), delta_(std::move(delta)) {
  if (a_.empty() || a_.size() != delta_.size()) {
    throw std::invalid_argument("delta table: need equal nonempty columns");
  }
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] > 0.0 && a_[i] <= 1.0)) throw std::invalid_argument("delta table: a must lie in (0, 1]");
    if (i > 0 && !(a_[i] > a_[i - 1])) throw std::invalid_argument("delta table: a must increase");
    if (!(delta_[i] >= 0.0)) throw std::invalid_argument("delta table: delta must be >= 0");
  }
}

double DeltaTable::modulus_for(double capacity_bound) const {
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (delta_[i] > capacity_bound) return a_[i];
  }
  return 1.0;
}

std::size_t Certificate::finite_points() const {
  return static_cast<std::size_t>(
      std::count_if(bounds.begin(), bounds.end(), [](double b) { return std::isfinite(b); }));
}

Certificate capacity_decay_certificate(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                                       const Point& x0, double r0,
                                       const std::vector<double>& epsilons,
                                       const std::optional<DeltaTable>& delta,
                                       const OrliczBoundOptions& opt) {
  check_grid(epsilons);
  Certificate c;
  c.kind = CertificateKind::kCapacityDecay;
  c.inputs = make_inputs(phi, e, m0, x0, r0);
  c.provenance = {"ring_modulus_bound", "orlicz_ring_integral_bound"};
  c.divergence = divergence_of(phi, e);
  c.epsilons = epsilons;
  for (double eps : epsilons) {
    c.bounds.push_back(ring_capacity_bound(phi, e, m0, x0, r0, eps, opt));
  }
  if (c.finite_points() == 0) {
    throw CertificateError("certificate: the Orlicz range is empty at every grid radius");
  }
  if (delta) {
    c.provenance.push_back("positive_capacity_separation");
    for (double b : c.bounds) c.chordal_modulus.push_back(delta->modulus_for(b));
  }
  return c;
}

Certificate diameter_certificate(const OrliczGauge& phi, const Exponents& e, MassBudget m0,
                                 const Point& x0, double r0, double b_n,
                                 const std::vector<double>& epsilons,
                                 const OrliczBoundOptions& opt) {
  check_grid(epsilons);
  const int n = e.n();
  const double p = e.p();
  if (!(p > n - 1.0 && p < n)) throw std::invalid_argument("diameter certificate: need n - 1 < p < n");
  if (!(b_n > 0.0) || !std::isfinite(b_n)) throw std::invalid_argument("diameter certificate: b_n must be positive");
  Certificate c;
  c.kind = CertificateKind::kDiameterBound;
  c.inputs = make_inputs(phi, e, m0, x0, r0);
  c.inputs.b_n = b_n;
  c.provenance = {"ring_modulus_bound", "orlicz_ring_integral_bound", "mazya_measure_bound",
                  "kruglikov_diameter_bound"};
  c.divergence = divergence_of(phi, e);
  c.epsilons = epsilons;

  // Stage 1: a measure bound for f(closed B(x0, eps)) from the Maz'ya inequality.
  const double mazya = n * std::pow(unit_ball_volume(n), p / n) *
                       std::pow((n - p) / (p - 1.0), p - 1.0);
  c.alpha1_min = kInf;
  for (double eps : epsilons) {
    const double a = ring_capacity_bound(phi, e, m0, x0, r0, eps, opt);
    const double a1 = std::pow(a / mazya, n / (n - p));
    c.alpha.push_back(a);
    c.alpha1.push_back(a1);
    c.alpha1_min = std::min(c.alpha1_min, a1);
    if (!c.eps1 && a1 <= 1.0) c.eps1 = eps;
  }
  if (!c.eps1) {
    c.stage1_failed = true;
    c.bounds.assign(epsilons.size(), kInf);
    c.alpha2.assign(epsilons.size(), kInf);
    return c;
  }
  // Stage 2: the ring (eps, eps1) inside a set of measure at most 1, then the
  // diameter inequality inverted.
  for (double eps : epsilons) {
    const double a2 = ring_capacity_bound(phi, e, m0, x0, *c.eps1, eps, opt);
    c.alpha2.push_back(a2);
    c.bounds.push_back(std::pow(std::pow(a2, n - 1.0) / b_n, 1.0 / p));
  }
  return c;
}

void write_certificate(std::ostream& out, const Certificate& c) {
  out << "# kind=" << to_string(c.kind) << '\n';
  out << "# gauge=" << c.inputs.gauge << '\n';
  out << "# n=" << c.inputs.n << '\n';
  out << "# p=" << format_number(c.inputs.p) << '\n';
  out << "# m0=" << format_number(c.inputs.m0) << '\n';
  out << "# x0=";
  for (std::size_t i = 0; i < c.inputs.x0.size(); ++i) {
    out << (i ? ";" : "") << format_number(c.inputs.x0[i]);
  }
  out << '\n';
  out << "# r0=" << format_number(c.inputs.r0) << '\n';
  if (c.inputs.b_n) out << "# b_n=" << format_number(*c.inputs.b_n) << '\n';
  out << "# divergence=" << to_string(c.divergence) << '\n';
  out << "# provenance=";
  for (std::size_t i = 0; i < c.provenance.size(); ++i) out << (i ? ";" : "") << c.provenance[i];
  out << '\n';
  if (c.kind == CertificateKind::kDiameterBound) {
    out << "# eps1=" << (c.eps1 ? format_number(*c.eps1) : std::string("none")) << '\n';
    out << "# alpha1_min=" << format_number(c.alpha1_min) << '\n';
  }

  std::vector<std::string> header{"eps", "bound"};
  const bool with_modulus = !c.chordal_modulus.empty();
  const bool with_stages = c.kind == CertificateKind::kDiameterBound;
  if (with_modulus) header.push_back("chordal_modulus");
  if (with_stages) {
    header.insert(header.end(), {"alpha", "alpha1", "alpha2"});
  }
  CsvTable table(header);
  for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
    std::vector<std::string> row{format_number(c.epsilons[k]), format_number(c.bounds[k])};
    if (with_modulus) row.push_back(format_number(c.chordal_modulus[k]));
    if (with_stages) {
      row.push_back(format_number(c.alpha[k]));
      row.push_back(format_number(c.alpha1[k]));
      row.push_back(format_number(c.alpha2[k]));
    }
    table.add_row(std::move(row));
  }
  out << table.str();
}

std::string certificate_summary(const Certificate& c) {
  CsvTable table({"kind", "gauge", "n", "p", "m0", "r0", "points", "finite_points",
                  "smallest_eps", "bound_at_smallest_eps", "eps1", "stage1_failed"});
  table.add_row({to_string(c.kind), c.inputs.gauge, std::to_string(c.inputs.n),
                 format_number(c.inputs.p), format_number(c.inputs.m0), format_number(c.inputs.r0),
                 std::to_string(c.epsilons.size()), std::to_string(c.finite_points()),
                 format_number(c.epsilons.back()), format_number(c.bounds.back()),
                 c.eps1 ? format_number(*c.eps1) : std::string(""),
                 c.stage1_failed ? "true" : "false"});
  return table.str();
}

}  // namespace qmod
