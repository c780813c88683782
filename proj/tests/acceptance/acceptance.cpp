// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmod/capacity.hpp"
#include "qmod/chordal.hpp"
#include "qmod/constants.hpp"
#include "qmod/diagnostics.hpp"
#include "qmod/field.hpp"
#include "qmod/orlicz.hpp"
#include "qmod/radial.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace qmod;

namespace {

constexpr double kPi = std::numbers::pi;
const double kE = std::exp(1.0);
const fs::path kScenarios = QMOD_SCENARIO_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::vector<std::string> head;
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (head.empty()) {
      head = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < head.size() && i < cells.size(); ++i) row[head[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::string> read_manifest(const fs::path& dir) {
  std::istringstream in(slurp(dir / "manifest.txt"));
  std::map<std::string, std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qmod_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

Outcome ring_capacity_sandwich() {
  const Condenser ring{Ball{{0, 0}, kE}, Ball{{0, 0}, 1.0}};
  const Exponents e(2, 2);
  const double exact = ring_capacity_exact(1.0, kE, e);
  DiscreteCapacityOptions o;
  o.resolution = 256;
  const GridSolution coarse = discrete_p_capacity(ring, e, o);
  o.resolution = 512;
  const auto t0 = std::chrono::steady_clock::now();
  const GridSolution fine = discrete_p_capacity(ring, e, o);
  const double wall = seconds_since(t0);
  const double err_coarse = std::abs(coarse.energy - exact) / exact;
  const double err_fine = std::abs(fine.energy - exact) / exact;
  const double ratio = err_coarse / err_fine;
  return {fine.converged && err_fine <= 0.05 && ratio >= 1.5 && wall <= 60.0,
          fmt("cap512=%.6f exact=%.6f rel_err=%.3e err256/err512=%.2f wall=%.1fs", fine.energy, exact, err_fine,
              ratio, wall)};
}

Outcome fubini_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool converged = true;
  int cases = 0;
  for (int n : {2, 3}) {
    const Point c(n, 0.0);
    const Ball support{c, 1.0};
    // Grid field sampled from the multilinear prod_i (1.5 + 0.5 (i + 1) x_i / n)
    // on 9^n nodes over [-1, 1]^n, so the interpolant reproduces it exactly.
    std::vector<std::size_t> counts(n, 9);
    std::vector<double> values;
    const std::size_t total = n == 2 ? 81 : 729;
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t rest = k;
      double v = 1.0;
      for (int i = n - 1; i >= 0; --i) {
        const double x = -1.0 + 0.25 * static_cast<double>(rest % 9);
        rest /= 9;
        v *= 1.5 + 0.5 * (i + 1) * x / n;
      }
      values.push_back(v);
    }
    const std::vector<ScalarField> fields{
        ScalarField(ConstantField{1.0}, WholeSpace{n}),
        ScalarField(LogPowerField{c, 1.0}, support),
        ScalarField(GridField(Point(n, -1.0), Point(n, 1.0), counts, values), support),
    };
    const RingCondenser ring(c, 0.1, 0.9);
    const Exponents e(n, n == 2 ? 2.0 : 2.5);
    for (const auto& q : fields) {
      const FubiniCheck f = fubini_check(q, ring, e, SphereQuadrature::default_for(n));
      worst = std::max(worst, f.relative_gap());
      converged = converged && f.lhs_converged;
      ++cases;
    }
  }
  const double wall = seconds_since(t0);
  return {converged && worst <= 1e-3 && wall <= 30.0,
          fmt("%d fields, worst relative gap=%.3e, wall=%.1fs", cases, worst, wall)};
}

Outcome mazya_equality() {
  const Exponents e(3, 2);
  const double bound = mazya_lower_bound(unit_ball_volume(3), e);
  const double rel = std::abs(bound - 4 * kPi) / (4 * kPi);
  const Condenser cond{Ball{{0, 0, 0}, 4.0}, Ball{{0, 0, 0}, 1.0}};
  DiscreteCapacityOptions o;
  o.resolution = 96;
  const GridSolution sol = discrete_p_capacity(cond, e, o);
  return {rel <= 1e-10 && sol.converged && sol.energy > 0.9 * 4 * kPi,
          fmt("mazya(Omega_3)=%.12f rel_err=%.1e; discrete ball-in-ball(R=4)@96=%.4f vs 0.9*4pi=%.4f (exact %.4f)",
              bound, rel, sol.energy, 0.9 * 4 * kPi, ring_capacity_exact(1.0, 4.0, e))};
}

Outcome chain_inequality() {
  const OrliczGauge phi(ExponentialGauge{});
  const double m0 = 40.0;
  int cases = 0, violations = 0, informative = 0, inadmissible = 0;
  double worst_margin = INFINITY;
  for (int n : {2, 3}) {
    const Exponents e(n, n == 2 ? 2.0 : 2.5);
    const double r0 = n == 2 ? 1.0 : 0.9;
    const Point x0(n, 0.0);
    const Ball support{x0, 1.0};
    const std::vector<ScalarField> fields{
        ScalarField(ConstantField{1.0}, support),
        ScalarField(ConstantField{2.0}, support),
        ScalarField(LogPowerField{x0, 1.0}, support),
        ScalarField(LogPowerField{x0, 0.5}, support),
        ScalarField(RadialPowerField{x0, 0.5, 3.0}, support),
    };
    const std::vector<double> eps = n == 2 ? std::vector{1e-2, 1e-5} : std::vector{1e-3, 1e-6};
    for (const auto& q : fields) {
      if (!verify_mass_bound(q, phi, support, MassBudget(m0)).satisfied) {
        ++inadmissible;
        continue;
      }
      for (double ep : eps) {
        const RingIntegral I = ring_integral(q, RingCondenser(x0, ep, r0), e, SphereQuadrature::default_for(n));
        const double lower = ring_integral_lower_bound(phi, e, MassBudget(m0), x0, r0, ep);
        ++cases;
        informative += lower > 0.0 ? 1 : 0;
        const double margin = I.value.value() - lower;
        worst_margin = std::min(worst_margin, margin);
        if (!(margin >= -1e-6)) ++violations;
      }
    }
  }
  return {cases == 20 && violations == 0 && inadmissible == 0,
          fmt("%d cases (%d with a positive bound), %d violations, %d fields over budget, min(I - bound)=%.4g", cases,
              informative, violations, inadmissible, worst_margin)};
}

Outcome closed_form_orlicz() {
  const OrliczGauge phi(ExponentialGauge{});
  const Exponents e(2, 2);
  const double m0 = kPi / 8;
  const Point x0{0, 0};
  const double r0 = 1.0;
  // Lower limit log(2 beta M0 e / (Omega r0^2)) with beta = 4, clamped at 1.
  const double lo = std::max(1.0, std::log(2 * 4 * m0 * kE / kPi));
  double worst = 0.0;
  for (double ep = 0.5; ep > 1e-300; ep *= 1e-3) {
    const double hi = 2 * std::log(r0 / ep);
    const double closed = hi > lo ? 0.5 * (std::log(hi) - std::log(lo)) : 0.0;
    const double got = ring_integral_lower_bound(phi, e, MassBudget(m0), x0, r0, ep);
    worst = std::max(worst, std::abs(got - closed) / std::max(closed, 1e-300));
  }
  bool inverted = true;
  std::string sig;
  const double step = std::pow(10.0, 1.0 / 64);
  for (double sigma : {0.5, 1.0, 2.0}) {
    const EpsilonStar s = epsilon_star(phi, e, MassBudget(m0), x0, r0, sigma);
    // 0.5 log(2 log(1/eps) / lo) >= sigma  <=>  eps <= exp(-lo e^{2 sigma} / 2).
    const double eps_cf = std::exp(-lo * std::exp(2 * sigma) / 2);
    const bool ok = s.found && s.r_star <= eps_cf * (1 + 1e-12) && s.r_star * step > eps_cf * (1 - 1e-12);
    inverted = inverted && ok;
    sig += fmt(" sigma=%g:r*=%.4e/closed=%.4e", sigma, s.r_star, eps_cf);
  }
  return {worst <= 1e-8 && inverted, fmt("max rel err=%.2e;%s", worst, sig.c_str())};
}

Outcome soundness_sweep() {
  const fs::path out = scratch("soundness");
  qmod::cli::RunOptions opt;
  opt.out_dir = out;
  const auto r = qmod::cli::run_scenario(kScenarios / "soundness_stretch.json", opt);
  if (r.code != qmod::cli::kExitOk) return {false, "soundness run failed: " + r.reason};
  const auto m = read_manifest(out);
  std::size_t rows = 0, bad = 0, exact_bad = 0;
  for (const auto& row : read_csv(out / "soundness.csv")) {
    ++rows;
    bad += row.at("violated") == "true" ? 1 : 0;
    // The image of the closed eps-ball is the closed eps^a-ball.
    const double exact = 2 * std::pow(std::stod(row.at("eps")), std::stod(row.at("stretch")));
    exact_bad += exact > std::stod(row.at("certificate")) ? 1 : 0;
  }
  std::size_t maps = 0;
  bool admissible = true;
  for (const auto& row : read_csv(out / "soundness_maps.csv")) {
    ++maps;
    admissible = admissible && row.at("admissible") == "true";
  }
  fs::remove_all(out);
  return {maps == 3 && admissible && rows > 0 && bad == 0 && exact_bad == 0 && m.at("soundness.violations") == "0",
          fmt("%zu maps, %zu (map, eps) checks, b_n=%s, violations=%zu (exact diameters: %zu)", maps, rows,
              m.at("soundness.b_n").c_str(), bad, exact_bad)};
}

Outcome metric_axioms() {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 9);
  auto sample = [&](int n) {
    const int k = pick(rng);
    if (k == 0) return ExtendedPoint::infinity();
    Point x(n);
    const double scale = std::pow(10.0, 4.0 * unif(rng));
    for (double& v : x) v = scale * unif(rng);
    return ExtendedPoint(x);
  };
  double worst = 0.0, largest = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 2 + t % 3;
    const ExtendedPoint x = sample(n), y = sample(n), z = sample(n);
    const double xy = chordal_distance(x, y), yz = chordal_distance(y, z), xz = chordal_distance(x, z);
    worst = std::max(worst, xz - xy - yz);
    largest = std::max({largest, xy, yz, xz});
  }
  return {worst <= 1e-12 && largest <= 1.0,
          fmt("10000 triples, max(h(x,z) - h(x,y) - h(y,z))=%.2e, max h=%.15f", worst, largest)};
}

Outcome determinism() {
  std::vector<fs::path> configs;
  for (const auto& f : fs::directory_iterator(kScenarios)) {
    if (f.path().extension() == ".json" && f.path().stem() != "invalid_ring") configs.push_back(f.path());
  }
  std::sort(configs.begin(), configs.end());
  std::size_t files = 0;
  std::string diff;
  for (const auto& cfg : configs) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    qmod::cli::RunOptions oa, ob;
    oa.out_dir = a;
    ob.out_dir = b;
    const auto ra = qmod::cli::run_scenario(cfg, oa);
    const auto rb = qmod::cli::run_scenario(cfg, ob);
    if (ra.files.size() != rb.files.size() || ra.files.empty()) diff += " " + cfg.filename().string();
    for (std::size_t i = 0; i < ra.files.size() && i < rb.files.size(); ++i) {
      ++files;
      if (slurp(ra.files[i]) != slurp(rb.files[i])) diff += " " + ra.files[i].filename().string();
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
  return {diff.empty(), fmt("%zu scenarios, %zu data files compared%s%s", configs.size(), files,
                            diff.empty() ? "" : ", differing:", diff.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"ring capacity sandwich", ring_capacity_sandwich},
      {"fubini identity", fubini_identity},
      {"mazya equality case", mazya_equality},
      {"orlicz chain inequality", chain_inequality},
      {"closed-form orlicz oracle", closed_form_orlicz},
      {"certificate soundness sweep", soundness_sweep},
      {"chordal metric axioms", metric_axioms},
      {"scenario determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
