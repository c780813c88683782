#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "qmod/capacity.hpp"
#include "qmod/certify.hpp"
#include "qmod/chordal.hpp"
#include "qmod/constants.hpp"
#include "qmod/diagnostics.hpp"
#include "qmod/grid_io.hpp"
#include "qmod/orlicz.hpp"
#include "qmod/radial.hpp"
#include "qmod/table.hpp"

#ifndef QMOD_VERSION
#define QMOD_VERSION "unknown"
#endif

namespace qmod::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class Task {
  kMassCheck,
  kRingBound,
  kFubini,
  kOrliczCurve,
  kEpsilonStar,
  kCapacityOracle,
  kCapacityCertificate,
  kDiameterCertificate,
  kSoundnessSweep,
};

const std::map<std::string, Task>& task_names() {
  static const std::map<std::string, Task> names{
      {"mass-check", Task::kMassCheck},
      {"ring-bound", Task::kRingBound},
      {"fubini", Task::kFubini},
      {"orlicz-curve", Task::kOrliczCurve},
      {"epsilon-star", Task::kEpsilonStar},
      {"capacity-oracle", Task::kCapacityOracle},
      {"capacity-certificate", Task::kCapacityCertificate},
      {"diameter-certificate", Task::kDiameterCertificate},
      {"soundness-sweep", Task::kSoundnessSweep},
  };
  return names;
}

[[noreturn]] void invalid(const std::string& what) { throw ScenarioError(kExitValidation, what); }

// Typed accessors that report the offending key.
const json& require(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) invalid("missing key '" + key + "'");
  return j.at(key);
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) invalid("'" + key + "' must be a number");
  return j.get<double>();
}

double number(const json& j, const std::string& key) { return as_number(require(j, key), key); }

double number_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? as_number(j.at(key), key) : fallback;
}

int integer_or(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) invalid("'" + key + "' must be an integer");
  return v.get<int>();
}

std::string string_or(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) invalid("'" + key + "' must be a string");
  return v.get<std::string>();
}

bool bool_or(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) invalid("'" + key + "' must be true or false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array()) invalid("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_number(v, key));
  return out;
}

Point point(const json& j, const std::string& key, int n) {
  Point p = numbers(require(j, key), key);
  if (static_cast<int>(p.size()) != n) invalid("'" + key + "' must have " + std::to_string(n) + " entries");
  return p;
}

Point point_or_origin(const json& j, const std::string& key, int n) {
  return j.contains(key) ? point(j, key, n) : Point(n, 0.0);
}

template <class Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    invalid(e.what());
  }
}

Domain parse_domain(const json& j, int n) {
  const std::string type = string_or(j, "type", "");
  Domain d;
  if (type == "whole-space") {
    d = WholeSpace{n};
  } else if (type == "ball") {
    d = Ball{point_or_origin(j, "center", n), number(j, "radius")};
  } else if (type == "annulus") {
    d = Annulus{point_or_origin(j, "center", n), number(j, "inner"), number(j, "outer")};
  } else if (type == "box") {
    d = Box{point(j, "lo", n), point(j, "hi", n)};
  } else {
    invalid("domain type must be whole-space, ball, annulus or box");
  }
  guarded([&] { validate(d); return 0; });
  return d;
}

Region parse_region(const json& j, int n) {
  const std::string type = string_or(j, "type", "");
  if (type == "ball") return Ball{point_or_origin(j, "center", n), number(j, "radius")};
  if (type == "box") return Box{point(j, "lo", n), point(j, "hi", n)};
  invalid("condenser plate type must be ball or box");
}

ScalarField parse_field(const json& j, int n, const fs::path& base) {
  const std::string type = string_or(j, "type", "");
  const Domain support = j.contains("support") ? parse_domain(j.at("support"), n) : Domain{WholeSpace{n}};
  return guarded([&]() -> ScalarField {
    if (type == "constant") return ScalarField(ConstantField{number(j, "value")}, support);
    if (type == "radial-power") {
      return ScalarField(RadialPowerField{point_or_origin(j, "center", n), number(j, "exponent"),
                                          number_or(j, "cap", std::numeric_limits<double>::infinity())},
                         support);
    }
    if (type == "log-power") {
      return ScalarField(LogPowerField{point_or_origin(j, "center", n), number(j, "power")}, support);
    }
    if (type == "grid") {
      std::optional<double> outside;
      if (j.contains("outside")) outside = number(j, "outside");
      if (j.contains("path")) {
        const fs::path path = base / string_or(j, "path", "");
        if (!fs::exists(path)) throw ScenarioError(kExitIo, "grid file not found: " + path.string());
        GridField g = read_grid_file(path);
        if (g.dimension() != n) invalid("grid field dimension does not match n");
        return ScalarField(GridField(g.lo(), g.hi(), g.counts(), g.values(), outside), support);
      }
      std::vector<std::size_t> counts;
      for (double c : numbers(require(j, "counts"), "counts")) {
        if (c < 2 || c != std::floor(c)) invalid("grid counts must be integers >= 2");
        counts.push_back(static_cast<std::size_t>(c));
      }
      return ScalarField(GridField(point(j, "lo", n), point(j, "hi", n), counts,
                                   numbers(require(j, "values"), "values"), outside),
                         support);
    }
    invalid("field type must be constant, radial-power, log-power or grid");
  });
}

OrliczGauge parse_gauge(const json& j) {
  const std::string type = string_or(j, "type", "");
  return guarded([&]() -> OrliczGauge {
    if (type == "exp") return OrliczGauge(ExponentialGauge{});
    if (type == "power-exp") {
      const double beta = number(j, "beta");
      if (!(beta >= 1.0)) invalid("power-exp gauge needs beta >= 1 for convexity");
      return OrliczGauge(PowerExponentialGauge{beta});
    }
    if (type == "power") {
      const double alpha = number(j, "alpha");
      if (!(alpha >= 1.0)) invalid("power gauge needs alpha >= 1");
      return OrliczGauge(PowerGauge{alpha});
    }
    if (type == "tabulated") {
      return OrliczGauge(TabulatedGauge(numbers(require(j, "t"), "t"), numbers(require(j, "phi"), "phi")));
    }
    invalid("gauge type must be exp, power-exp, power or tabulated");
  });
}

SphereQuadrature parse_sphere(const json& j, int n, std::uint64_t seed) {
  if (!j.contains("sphere")) {
    return n > 3 ? SphereQuadrature::monte_carlo(n, 4096, seed) : SphereQuadrature::default_for(n);
  }
  const json& s = j.at("sphere");
  const std::string scheme = string_or(s, "scheme", "");
  const int nodes = integer_or(s, "nodes", 0);
  return guarded([&] {
    if (scheme == "trapezoid") return SphereQuadrature::trapezoid(nodes);
    if (scheme == "product-gauss") return SphereQuadrature::product_gauss(nodes);
    if (scheme == "monte-carlo") return SphereQuadrature::monte_carlo(n, nodes, seed);
    invalid("sphere scheme must be trapezoid, product-gauss or monte-carlo");
  });
}

// Everything a task needs, built and validated before any computation.
struct Scenario {
  Task task = Task::kMassCheck;
  std::string task_name;
  json raw;
  fs::path base;
  int n = 2;
  double p = 2.0;
  std::uint64_t seed = 1;
  ToleranceProfile tol;
  std::optional<Exponents> exps;
  std::optional<ScalarField> field;
  std::optional<OrliczGauge> gauge;
  std::optional<Domain> domain;
  std::optional<RingCondenser> ring;
  std::optional<Condenser> condenser;
  std::optional<SphereQuadrature> sphere;
  std::optional<DeltaTable> delta;
  double m0 = 0.0;
  Point x0;
  double r0 = 0.0;
  std::vector<double> sigmas;
  CertificateGrid grid;
  OrliczBoundOptions orlicz;
  std::optional<double> b_n;
  json calibration;
  std::vector<double> stretch;
  std::string default_out;
};

void need_radii(const Scenario& s) {
  if (!(s.r0 > 0.0)) invalid("'r0' must be positive");
  if (s.p < s.n && !(s.r0 < 1.0)) invalid("'r0' must be below 1 when p < n");
}

CertificateGrid parse_grid(const json& j) {
  CertificateGrid g;
  if (!j.contains("grid")) return g;
  const json& gj = j.at("grid");
  g.points_per_decade = integer_or(gj, "points_per_decade", g.points_per_decade);
  g.decades = integer_or(gj, "decades", g.decades);
  if (g.points_per_decade < 1 || g.decades < 1) invalid("grid needs points_per_decade >= 1 and decades >= 1");
  if (g.decades > 300) invalid("grid decades must be at most 300");
  return g;
}

Scenario parse(const json& j, const fs::path& base, const fs::path& config) {
  if (!j.is_object()) invalid("config must be a JSON object");
  Scenario s;
  s.raw = j;
  s.base = base;
  s.task_name = string_or(j, "task", "");
  const auto it = task_names().find(s.task_name);
  if (it == task_names().end()) invalid("unknown task '" + s.task_name + "'");
  s.task = it->second;
  s.n = integer_or(j, "n", 0);
  s.p = number_or(j, "p", s.n);
  s.exps = guarded([&] { return Exponents(s.n, s.p); });
  const int seed = integer_or(j, "seed", 1);
  if (seed < 0) invalid("'seed' must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);
  s.default_out = string_or(j, "output_dir", "qmod_" + config.stem().string());

  const char* env = std::getenv("QMOD_TOLERANCE_PROFILE");
  std::string profile = env && *env ? env : "default";
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    profile = string_or(t, "profile", profile);
    s.tol = guarded([&] { return ToleranceProfile::named(profile); });
    s.tol.volume_rel_tol = number_or(t, "volume_rel_tol", s.tol.volume_rel_tol);
    s.tol.radial_rel_tol = number_or(t, "radial_rel_tol", s.tol.radial_rel_tol);
    s.tol.energy_rel_tol = number_or(t, "energy_rel_tol", s.tol.energy_rel_tol);
  } else {
    s.tol = guarded([&] { return ToleranceProfile::named(profile); });
  }

  const int n = s.n;
  auto need_field = [&] { s.field = parse_field(require(j, "field"), n, base); };
  auto need_gauge = [&] { s.gauge = parse_gauge(require(j, "gauge")); };
  auto need_m0 = [&] {
    s.m0 = number(j, "m0");
    if (!(s.m0 > 0.0) || !std::isfinite(s.m0)) invalid("'m0' must be positive and finite");
  };
  auto need_ring = [&] {
    const json& r = require(j, "ring");
    s.ring = guarded([&] { return RingCondenser(point_or_origin(r, "center", n), number(r, "r1"), number(r, "r2")); });
    if (!std::isfinite(s.ring->r2())) invalid("ring r2 must be finite");
    s.sphere = parse_sphere(j, n, s.seed);
  };
  auto need_center = [&] {
    s.x0 = point_or_origin(j, "x0", n);
    s.r0 = number(j, "r0");
    need_radii(s);
  };
  auto need_floor = [&] {
    if (j.contains("phi_floor_t")) s.orlicz.phi_floor_t = number(j, "phi_floor_t");
    if (s.gauge->at_zero() == 0.0 && !s.orlicz.phi_floor_t) {
      invalid("gauge has Phi(0) = 0; set 'phi_floor_t'");
    }
  };
  auto need_divergence = [&] {
    if (bool_or(j, "allow_conditional", false)) return;
    const double tau0 = s.gauge->at_zero();
    const double delta0 = tau0 > 0.0 ? std::exp(1.0) * tau0 : 1.0;
    const auto verdict = divergence_diagnostic(*s.gauge, s.exps->mean_power(), delta0, delta0).verdict;
    if (verdict == DivergenceVerdict::kConvergesClosedForm) {
      invalid("divergence condition fails for this gauge and p; set allow_conditional to proceed");
    }
  };

  switch (s.task) {
    case Task::kMassCheck:
      need_field();
      need_gauge();
      need_m0();
      s.domain = parse_domain(require(j, "domain"), n);
      break;
    case Task::kRingBound:
    case Task::kFubini:
      need_field();
      need_ring();
      if (integer_or(j, "radial_resolution", 64) < 32) invalid("'radial_resolution' must be >= 32");
      break;
    case Task::kOrliczCurve:
    case Task::kEpsilonStar:
      if (s.task == Task::kOrliczCurve && j.contains("field")) {
        need_field();
        s.sphere = parse_sphere(j, n, s.seed);
      }
      need_gauge();
      need_m0();
      need_center();
      need_floor();
      if (j.contains("sigma") && j.at("sigma").is_array()) {
        s.sigmas = numbers(j.at("sigma"), "sigma");
      } else {
        s.sigmas = {number(j, "sigma")};
      }
      if (s.sigmas.empty()) invalid("'sigma' must not be empty");
      for (double v : s.sigmas) {
        if (!(v > 0.0)) invalid("'sigma' must be positive");
      }
      s.grid = parse_grid(j);
      break;
    case Task::kCapacityOracle: {
      const json& c = require(j, "condenser");
      s.condenser = Condenser{parse_region(require(c, "outer"), n), parse_region(require(c, "inner"), n)};
      guarded([&] { validate(*s.condenser); return 0; });
      if (dimension(s.condenser->outer) != n) invalid("condenser dimension does not match n");
      if (integer_or(j, "resolution", 64) < 32) invalid("'resolution' must be >= 32");
      const std::string mask = string_or(j, "mask", "node");
      if (mask != "node" && mask != "conforming") invalid("'mask' must be node or conforming");
      break;
    }
    case Task::kCapacityCertificate:
      need_gauge();
      need_m0();
      need_center();
      need_floor();
      if (!s.exps->conformal()) invalid("capacity-certificate needs p = n");
      s.grid = parse_grid(j);
      if (j.contains("delta_table")) {
        const json& d = j.at("delta_table");
        s.delta = guarded([&] {
          return DeltaTable(numbers(require(d, "a"), "a"), numbers(require(d, "delta"), "delta"));
        });
      }
      need_divergence();
      break;
    case Task::kDiameterCertificate:
    case Task::kSoundnessSweep:
      need_gauge();
      need_m0();
      need_center();
      need_floor();
      if (!(s.p > n - 1.0 && s.p < n)) invalid("diameter certificates need n - 1 < p < n");
      s.grid = parse_grid(j);
      if (j.contains("b_n") && j.at("b_n").is_object()) {
        s.calibration = j.at("b_n").at("calibrate");
        const double half = number_or(s.calibration, "segment_half_length", 0.5);
        if (!(half > 0.0 && half < 1.0)) invalid("calibration segment_half_length must lie in (0, 1)");
        if (integer_or(s.calibration, "resolution", 32) < 32) invalid("calibration resolution must be >= 32");
      } else {
        s.b_n = number_or(j, "b_n", 1.0);
        if (!(*s.b_n > 0.0) || !std::isfinite(*s.b_n)) invalid("'b_n' must be positive");
      }
      if (s.task == Task::kSoundnessSweep) {
        if (!s.gauge->is_catalog()) invalid("soundness-sweep needs a catalog gauge");
        for (double v : s.x0) {
          if (v != 0.0) invalid("soundness-sweep maps are centred at the origin; x0 must be 0");
        }
        s.stretch = j.contains("stretch_exponents") ? numbers(j.at("stretch_exponents"), "stretch_exponents")
                                                    : std::vector<double>{1.5, 2.0, 3.0};
        for (double a : s.stretch) {
          if (!(a > 1.0)) invalid("stretch exponents must exceed 1");
        }
        if (s.stretch.empty()) invalid("'stretch_exponents' must not be empty");
      }
      need_divergence();
      break;
  }
  return s;
}

Scenario load(const fs::path& config) {
  std::ifstream in(config);
  if (!in) throw ScenarioError(kExitIo, "cannot read config " + config.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse(j, config.parent_path(), config);
}

VolumeOptions volume_options(const Scenario& s) {
  VolumeOptions v;
  v.rel_tol = s.tol.volume_rel_tol;
  return v;
}

RadialOptions radial_options(const Scenario& s) {
  RadialOptions r;
  r.rel_tol = s.tol.radial_rel_tol;
  r.resolution = integer_or(s.raw, "radial_resolution", r.resolution);
  return r;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// Collects output files in memory; nothing touches the disk until the task
// has finished.
struct Output {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::pair<std::string, std::string>> manifest;
  ExitCode code = kExitOk;
  std::string reason;

  void file(std::string name, std::string contents) { files.emplace_back(std::move(name), std::move(contents)); }
  void note(std::string key, std::string value) { manifest.emplace_back(std::move(key), std::move(value)); }
  void fail(ExitCode c, std::string why) {
    code = c;
    reason = std::move(why);
  }
};

void run_mass_check(const Scenario& s, Output& out) {
  const MassCheck m = verify_mass_bound(*s.field, *s.gauge, *s.domain, MassBudget(s.m0), volume_options(s));
  CsvTable t({"integral", "error_estimate", "m0", "satisfied", "diverged"});
  t.add_row({format_number(m.integral.value()), format_number(m.error_estimate), format_number(s.m0),
             bool_text(m.satisfied), bool_text(m.diverged)});
  out.file("mass_check.csv", t.str());
}

void run_ring_bound(const Scenario& s, Output& out) {
  const RingIntegral I = ring_integral(*s.field, *s.ring, *s.exps, *s.sphere, radial_options(s));
  const ExtendedNonneg bound = modulus_upper_bound(I.value, *s.exps);
  CsvTable t({"r1", "r2", "ring_integral", "bound", "intervals", "converged"});
  t.add_row({format_number(s.ring->r1()), format_number(s.ring->r2()), format_number(I.value.value()),
             format_number(bound.value()), std::to_string(I.intervals), bool_text(I.converged)});
  out.file("ring_bound.csv", t.str());
  std::ostringstream prof;
  write_radial_profile(prof, radial_profile(*s.field, *s.ring, integer_or(s.raw, "profile_points", 64), *s.sphere));
  out.file("radial_profile.csv", prof.str());
  if (!I.converged) out.fail(kExitNumerical, "ring integral did not reach the requested tolerance");
}

void run_fubini(const Scenario& s, Output& out) {
  const FubiniCheck f = fubini_check(*s.field, *s.ring, *s.exps, *s.sphere, radial_options(s), volume_options(s));
  CsvTable t({"lhs", "rhs", "relative_gap", "lhs_error", "lhs_converged"});
  t.add_row({format_number(f.lhs), format_number(f.rhs), format_number(f.relative_gap()),
             format_number(f.lhs_error), bool_text(f.lhs_converged)});
  out.file("fubini.csv", t.str());
  if (!f.lhs_converged) out.fail(kExitNumerical, "volume quadrature did not converge");
}

void run_orlicz_curve(const Scenario& s, Output& out) {
  const auto eps = certificate_grid(s.r0, s.n, s.grid);
  const auto curve = orlicz_bound_curve(*s.gauge, *s.exps, MassBudget(s.m0), s.x0, s.r0, s.sigmas.front(), eps, s.orlicz);
  std::ostringstream text;
  write_orlicz_curve(text, curve);
  out.file("orlicz_curve.csv", text.str());
  if (!s.field) return;
  // With a concrete field: the measured annulus mean M* and the sharper bound
  // built on it, next to the budget bound and the ring integral itself.
  CsvTable t({"eps", "m_star", "m_star_upper", "within_budget", "budget_bound", "measured_bound", "ring_integral"});
  bool within = true;
  for (std::size_t k = 0; k < curve.epsilons.size(); ++k) {
    const double eps = curve.epsilons[k];
    const AnnulusMeanReport m =
        annulus_phi_mean(*s.field, *s.gauge, s.x0, eps, s.r0, MassBudget(s.m0), volume_options(s));
    const double sharper = m.m_star > 0.0 ? measured_mean_lower_bound(*s.gauge, *s.exps, m.m_star, s.r0, eps, s.orlicz)
                                          : 0.0;
    const RingIntegral I = ring_integral(*s.field, RingCondenser(s.x0, eps, s.r0), *s.exps, *s.sphere, radial_options(s));
    const bool ok = m.m_star <= m.m_star_upper;
    within = within && ok;
    t.add_row({format_number(eps), format_number(m.m_star), format_number(m.m_star_upper), bool_text(ok),
               format_number(curve.lower_bounds[k]), format_number(sharper), format_number(I.value.value())});
  }
  out.file("orlicz_measured.csv", t.str());
  if (!within) out.fail(kExitNumerical, "the field's annulus mean exceeds what the mass budget allows");
}

void run_epsilon_star(const Scenario& s, Output& out) {
  EpsilonStarOptions o;
  o.points_per_decade = s.grid.points_per_decade;
  o.floor_ratio = number_or(s.raw, "floor_ratio", o.floor_ratio);
  if (!(o.floor_ratio > 0.0 && o.floor_ratio < 1.0)) throw ScenarioError(kExitValidation, "'floor_ratio' must lie in (0, 1)");
  o.bound = s.orlicz;
  CsvTable t({"sigma", "found", "r_star", "floor", "best_bound", "divergence", "reason"});
  bool all_found = true;
  for (double sigma : s.sigmas) {
    const EpsilonStar e = epsilon_star(*s.gauge, *s.exps, MassBudget(s.m0), s.x0, s.r0, sigma, o);
    all_found = all_found && e.found;
    t.add_row({format_number(sigma), bool_text(e.found), e.found ? format_number(e.r_star) : "",
               format_number(e.floor), format_number(e.best_bound), std::string(to_string(e.divergence)),
               e.reason});
  }
  out.file("epsilon_star.csv", t.str());
  if (!all_found) out.fail(kExitNumerical, "sigma not reached above the search floor for some targets");
}

std::string region_text(const Region& r) {
  std::ostringstream o;
  if (const auto* b = std::get_if<Ball>(&r)) {
    o << "ball(r=" << format_number(b->radius) << ")";
  } else {
    const auto& box = std::get<Box>(r);
    o << "box(";
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      o << (i ? ";" : "") << format_number(box.lo[i]) << ":" << format_number(box.hi[i]);
    }
    o << ")";
  }
  return o.str();
}

// Exact capacity when both plates are concentric balls.
std::optional<double> exact_if_ring(const Condenser& c, const Exponents& e) {
  const auto* a = std::get_if<Ball>(&c.outer);
  const auto* b = std::get_if<Ball>(&c.inner);
  if (!a || !b || a->center != b->center || !(b->radius > 0.0)) return std::nullopt;
  return ring_capacity_exact(b->radius, a->radius, e);
}

void run_capacity_oracle(const Scenario& s, int jobs, Output& out) {
  DiscreteCapacityOptions o;
  o.resolution = integer_or(s.raw, "resolution", o.resolution);
  o.max_iterations = integer_or(s.raw, "max_iterations", o.max_iterations);
  o.rel_energy_tol = s.tol.energy_rel_tol;
  o.mask = string_or(s.raw, "mask", "node") == "conforming" ? PlateMask::kConforming : PlateMask::kNodeMembership;
  o.jobs = jobs;
  const GridSolution sol = discrete_p_capacity(*s.condenser, *s.exps, o);
  const auto exact = exact_if_ring(*s.condenser, *s.exps);
  CsvTable t({"outer", "inner", "n", "p", "resolution", "energy", "residual", "iterations", "converged",
              "exact_ring_capacity"});
  t.add_row({region_text(s.condenser->outer), region_text(s.condenser->inner), std::to_string(s.n),
             format_number(s.p), std::to_string(sol.resolution), format_number(sol.energy),
             format_number(sol.residual), std::to_string(sol.iterations), bool_text(sol.converged),
             exact ? format_number(*exact) : ""});
  out.file("capacity.csv", t.str());
  std::ostringstream grid;
  write_grid_text(grid, sol.as_field());
  out.file("potential.grid", grid.str());
  out.note("capacity.wall_seconds", format_number(sol.wall_seconds));
  if (!sol.converged) out.fail(kExitNumerical, "energy minimization hit the iteration cap; partial result flagged");
}

void emit_certificate(const Certificate& c, const OrliczGauge& phi, Output& out) {
  std::ostringstream text;
  write_certificate(text, c);
  out.file("certificate.csv", text.str());
  out.file("certificate_summary.csv", certificate_summary(c));
  // The bounds use exponent 1/(p-1); the 1/(n-1) verdict is reported alongside.
  const double tau0 = phi.at_zero();
  const double delta0 = tau0 > 0.0 ? std::exp(1.0) * tau0 : 1.0;
  for (const auto& [key, q] : {std::pair{"divergence.exponent_1_over_p_minus_1", 1.0 / (c.inputs.p - 1.0)},
                               std::pair{"divergence.exponent_1_over_n_minus_1", 1.0 / (c.inputs.n - 1.0)}}) {
    out.note(key, std::string(to_string(divergence_diagnostic(phi, q, delta0, delta0).verdict)));
  }
}

// b_n from the discrete capacity of a centred segment inside the unit ball.
double calibrate_b_n(const Scenario& s, int jobs, Output& out) {
  const double half = number_or(s.calibration, "segment_half_length", 0.5);
  Point lo(s.n, 0.0);
  Point hi(s.n, 0.0);
  lo[0] = -half;
  hi[0] = half;
  const Condenser cond{Ball{Point(s.n, 0.0), 1.0}, Box{lo, hi}};
  DiscreteCapacityOptions o;
  o.resolution = integer_or(s.calibration, "resolution", 32);
  o.rel_energy_tol = s.tol.energy_rel_tol;
  o.jobs = jobs;
  const GridSolution sol = discrete_p_capacity(cond, *s.exps, o);
  const double b = calibrate_kruglikov_constant(sol.energy, 2.0 * half, unit_ball_volume(s.n), *s.exps);
  out.note("calibration.capacity", format_number(sol.energy));
  out.note("calibration.wall_seconds", format_number(sol.wall_seconds));
  return b;
}

void run_capacity_certificate(const Scenario& s, Output& out) {
  const auto eps = certificate_grid(s.r0, s.n, s.grid);
  emit_certificate(capacity_decay_certificate(*s.gauge, *s.exps, MassBudget(s.m0), s.x0, s.r0, eps, s.delta, s.orlicz), *s.gauge, out);
}

Certificate diameter_from(const Scenario& s, double b_n) {
  const auto eps = certificate_grid(s.r0, s.n, s.grid);
  return diameter_certificate(*s.gauge, *s.exps, MassBudget(s.m0), s.x0, s.r0, b_n, eps, s.orlicz);
}

void run_diameter_certificate(const Scenario& s, int jobs, Output& out) {
  const double b = s.b_n ? *s.b_n : calibrate_b_n(s, jobs, out);
  const Certificate c = diameter_from(s, b);
  emit_certificate(c, *s.gauge, out);
  if (c.stage1_failed) {
    out.fail(kExitNumerical, "no grid radius brings the measure bound to 1; smallest value " + format_number(c.alpha1_min));
  } else if (c.finite_points() == 0) {
    out.fail(kExitNumerical, "empty certificate: the inner ring range is empty on the whole grid");
  }
}

// Largest ratio of image to source ring capacity for f(x) = x |x|^{a-1} over
// a fixed family of rings in the unit ball.
double stretch_ring_ratio(double a, const Exponents& e) {
  double worst = 0.0;
  for (int i = 1; i <= 12; ++i) {
    for (int k = i + 1; k <= 12; ++k) {
      const double r1 = std::pow(10.0, -0.5 * (12 - i));
      const double r2 = std::pow(10.0, -0.5 * (12 - k)) * 0.999;
      const double src = ring_capacity_exact(r1, r2, e);
      const double img = ring_capacity_exact(std::pow(r1, a), std::pow(r2, a), e);
      worst = std::max(worst, img / src);
    }
  }
  return worst;
}

// Diameter of f(closed B(0, eps)) sampled on the sphere of radius eps.
double measured_diameter(double a, double eps, const std::vector<Point>& dirs) {
  std::vector<Point> img;
  img.reserve(dirs.size());
  const double scale = std::pow(eps, a);
  for (const auto& u : dirs) {
    Point y(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) y[i] = scale * u[i];
    img.push_back(std::move(y));
  }
  return euclidean_diameter(img);
}

std::vector<Point> sample_directions(int n, std::uint64_t seed) {
  const SphereQuadrature q = SphereQuadrature::monte_carlo(n, 64, seed);
  std::vector<Point> dirs;
  for (int i = 0; i < q.node_count(); ++i) {
    Point u(q.direction(i).begin(), q.direction(i).end());
    Point v = u;
    for (double& x : v) x = -x;
    dirs.push_back(std::move(u));
    dirs.push_back(std::move(v));
  }
  return dirs;
}

void run_soundness_sweep(const Scenario& s, int jobs, Output& out) {
  const double b = s.b_n ? *s.b_n : calibrate_b_n(s, jobs, out);
  const Certificate c = diameter_from(s, b);
  emit_certificate(c, *s.gauge, out);
  if (c.stage1_failed) {
    out.fail(kExitNumerical, "certificate stage 1 failed; smallest measure bound " + format_number(c.alpha1_min));
    return;
  }
  const Ball unit{Point(s.n, 0.0), 1.0};
  CsvTable maps({"stretch", "q_constant", "max_ring_capacity_ratio", "mass_integral", "admissible"});
  CsvTable sweep({"stretch", "eps", "measured_diameter", "certificate", "violated"});
  const auto dirs = sample_directions(s.n, s.seed);
  std::size_t violations = 0;
  bool all_admissible = true;
  for (double a : s.stretch) {
    // Q = a bounds the p-distortion of every ring; the capacity ratio must agree.
    const double ratio = stretch_ring_ratio(a, *s.exps);
    const ScalarField q(ConstantField{a}, unit);
    const MassCheck m = verify_mass_bound(q, *s.gauge, unit, MassBudget(s.m0), volume_options(s));
    const bool admissible = m.satisfied && ratio <= a * (1.0 + 1e-12);
    all_admissible = all_admissible && admissible;
    maps.add_row({format_number(a), format_number(a), format_number(ratio), format_number(m.integral.value()),
                  bool_text(admissible)});
    if (!admissible) continue;
    for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
      const double d = measured_diameter(a, c.epsilons[k], dirs);
      const bool bad = d > c.bounds[k];
      violations += bad ? 1 : 0;
      sweep.add_row({format_number(a), format_number(c.epsilons[k]), format_number(d), format_number(c.bounds[k]),
                     bool_text(bad)});
    }
  }
  out.file("soundness_maps.csv", maps.str());
  out.file("soundness.csv", sweep.str());
  out.note("soundness.b_n", format_number(b));
  out.note("soundness.violations", std::to_string(violations));
  if (!all_admissible) {
    out.fail(kExitNumerical, "a catalog map falls outside the mapping class at this m0");
  } else if (violations > 0) {
    out.fail(kExitNumerical, std::to_string(violations) + " certificate violations");
  }
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && j.size() > 16) {
    out.emplace_back(prefix, "[" + std::to_string(j.size()) + " entries]");
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

std::string kind_of(ExitCode code) {
  switch (code) {
    case kExitOk:
      return "ok";
    case kExitValidation:
      return "validation";
    case kExitNumerical:
      return "numerical";
    case kExitIo:
      return "io";
  }
  return "unknown";
}

}  // namespace

ToleranceProfile ToleranceProfile::named(const std::string& name) {
  ToleranceProfile t;
  t.name = name;
  if (name == "default") return t;
  if (name == "fast") {
    t.volume_rel_tol = 1e-6;
    t.radial_rel_tol = 1e-6;
    t.energy_rel_tol = 1e-7;
    return t;
  }
  if (name == "strict") {
    t.volume_rel_tol = 1e-10;
    t.radial_rel_tol = 1e-10;
    t.energy_rel_tol = 1e-11;
    return t;
  }
  throw std::invalid_argument("unknown tolerance profile '" + name + "'");
}

std::string format_error(ExitCode code, const std::string& reason) {
  std::string flat = reason;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  return "error code=" + std::to_string(static_cast<int>(code)) + " kind=" + kind_of(code) + " reason=" + flat;
}

void validate_scenario(const fs::path& config) { load(config); }

RunResult run_scenario(const fs::path& config, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_timestamp();
  const Scenario s = load(config);
  const int jobs = opt.jobs.value_or(1);
  if (jobs < 1) invalid("--jobs must be >= 1");

  Output out;
  try {
    switch (s.task) {
      case Task::kMassCheck:
        run_mass_check(s, out);
        break;
      case Task::kRingBound:
        run_ring_bound(s, out);
        break;
      case Task::kFubini:
        run_fubini(s, out);
        break;
      case Task::kOrliczCurve:
        run_orlicz_curve(s, out);
        break;
      case Task::kEpsilonStar:
        run_epsilon_star(s, out);
        break;
      case Task::kCapacityOracle:
        run_capacity_oracle(s, jobs, out);
        break;
      case Task::kCapacityCertificate:
        run_capacity_certificate(s, out);
        break;
      case Task::kDiameterCertificate:
        run_diameter_certificate(s, jobs, out);
        break;
      case Task::kSoundnessSweep:
        run_soundness_sweep(s, jobs, out);
        break;
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const IoError& e) {
    throw ScenarioError(kExitIo, e.what());
  } catch (const std::exception& e) {
    // Anything raised past validation is a numerical failure; nothing is written.
    throw ScenarioError(kExitNumerical, e.what());
  }

  RunResult result;
  result.code = out.code;
  result.reason = out.reason;
  result.out_dir = opt.out_dir ? *opt.out_dir : fs::path(s.default_out);
  std::error_code ec;
  fs::create_directories(result.out_dir, ec);
  if (ec) throw ScenarioError(kExitIo, "cannot create output directory " + result.out_dir.string());
  try {
    for (const auto& [name, contents] : out.files) {
      const fs::path path = result.out_dir / name;
      write_file_atomic(path, contents);
      result.files.push_back(path);
    }
    std::ostringstream m;
    m << "tool=qmod\n";
    m << "version=" << QMOD_VERSION << '\n';
    m << "task=" << s.task_name << '\n';
    m << "config=" << fs::absolute(config).string() << '\n';
    m << "seed=" << s.seed << '\n';
    m << "jobs=" << jobs << '\n';
    m << "tolerance_profile=" << s.tol.name << '\n';
    m << "tolerance.volume_rel_tol=" << format_number(s.tol.volume_rel_tol) << '\n';
    m << "tolerance.radial_rel_tol=" << format_number(s.tol.radial_rel_tol) << '\n';
    m << "tolerance.energy_rel_tol=" << format_number(s.tol.energy_rel_tol) << '\n';
    std::vector<std::pair<std::string, std::string>> inputs;
    flatten(s.raw, "", inputs);
    for (const auto& [k, v] : inputs) m << "input." << k << '=' << v << '\n';
    for (const auto& [k, v] : out.manifest) m << k << '=' << v << '\n';
    for (const auto& f : result.files) m << "output=" << f.filename().string() << '\n';
    m << "status=" << kind_of(out.code) << '\n';
    m << "exit_code=" << static_cast<int>(out.code) << '\n';
    if (!out.reason.empty()) m << "reason=" << out.reason << '\n';
    m << "started_utc=" << started << '\n';
    m << "wall_seconds="
      << format_number(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) << '\n';
    write_file_atomic(result.out_dir / "manifest.txt", m.str());
  } catch (const IoError& e) {
    throw ScenarioError(kExitIo, e.what());
  }
  return result;
}

}  // namespace qmod::cli
