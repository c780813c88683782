#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "qmod/constants.hpp"
#include "qmod/extended.hpp"
#include "qmod/geometry.hpp"
#include "qmod/quadrature.hpp"
#include "qmod/table.hpp"

namespace qmod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

TEST(ExtendedNonneg, RejectsNegativeAndNaN) {
  EXPECT_THROW(ExtendedNonneg(-1e-300), std::invalid_argument);
  EXPECT_THROW(ExtendedNonneg(std::nan("")), std::invalid_argument);
  EXPECT_NO_THROW(ExtendedNonneg(0.0));
  EXPECT_TRUE(ExtendedNonneg(kInf).is_infinite());
}

TEST(ExtendedNonneg, InfinityOrdersAboveEverything) {
  EXPECT_LT(ExtendedNonneg(1e308), ExtendedNonneg::infinity());
  EXPECT_EQ(ExtendedNonneg(kInf), ExtendedNonneg::infinity());
}

TEST(ExtendedNonneg, DivisionConventions) {
  EXPECT_EQ(ext_div(ExtendedNonneg(3.0), ExtendedNonneg::infinity()).value(), 0.0);
  EXPECT_TRUE(ext_div(ExtendedNonneg(3.0), ExtendedNonneg(0.0)).is_infinite());
  EXPECT_EQ(ext_div(ExtendedNonneg(0.0), ExtendedNonneg(0.0)).value(), 0.0);
  EXPECT_EQ(ext_div(ExtendedNonneg(6.0), ExtendedNonneg(3.0)).value(), 2.0);
  EXPECT_THROW(ext_div(ExtendedNonneg::infinity(), ExtendedNonneg::infinity()), std::domain_error);
  EXPECT_TRUE(ext_div(ExtendedNonneg::infinity(), ExtendedNonneg(2.0)).is_infinite());
}

TEST(ExtendedNonneg, Power) {
  EXPECT_DOUBLE_EQ(ext_pow(ExtendedNonneg(4.0), 0.5).value(), 2.0);
  EXPECT_TRUE(ext_pow(ExtendedNonneg::infinity(), 2.0).is_infinite());
}

TEST(Constants, LowDimensions) {
  EXPECT_NEAR(unit_sphere_area(2), 2 * kPi, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4 * kPi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4 * kPi / 3, 1e-14);
  // omega_{n-1} = n Omega_n in every dimension.
  for (int n = 2; n <= 9; ++n) {
    EXPECT_NEAR(unit_sphere_area(n), n * unit_ball_volume(n), 1e-12) << n;
  }
  const auto c = DimensionalConstants::of(4);
  EXPECT_NEAR(c.omega, 2 * kPi * kPi, 1e-12);
  EXPECT_NEAR(c.big_omega, kPi * kPi / 2, 1e-12);
}

TEST(Geometry, ExponentsValidation) {
  EXPECT_THROW(Exponents(1, 1.5), std::invalid_argument);
  EXPECT_THROW(Exponents(3, 1.0), std::invalid_argument);
  EXPECT_THROW(Exponents(3, 3.5), std::invalid_argument);
  const Exponents e(3, 2.5);
  EXPECT_FALSE(e.conformal());
  EXPECT_DOUBLE_EQ(e.radial_power(), 2.0 / 1.5);
  EXPECT_DOUBLE_EQ(e.mean_power(), 1.0 / 1.5);
  EXPECT_TRUE(Exponents(2, 2.0).conformal());
}

TEST(Geometry, RingValidation) {
  EXPECT_THROW(RingCondenser({0, 0}, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RingCondenser({0, 0}, 0.0, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(RingCondenser({0, 0}, 0.5, 1.0));
}

TEST(Geometry, DomainsContainStrictly) {
  const Domain ball = Ball{{0, 0}, 1.0};
  const double inside[] = {0.5, 0.0};
  const double edge[] = {1.0, 0.0};
  EXPECT_TRUE(contains(ball, inside));
  EXPECT_FALSE(contains(ball, edge));
  const Domain ann = Annulus{{0, 0, 0}, 0.5, 1.0};
  const double hole[] = {0.1, 0.0, 0.0};
  const double shell[] = {0.7, 0.0, 0.0};
  EXPECT_FALSE(contains(ann, hole));
  EXPECT_TRUE(contains(ann, shell));
  EXPECT_NEAR(volume(ann), 4 * kPi / 3 * (1 - 0.125), 1e-14);
  EXPECT_THROW(validate(Domain{Ball{{0, 0}, -1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(Domain{Box{{0, 0}, {1}}}), std::invalid_argument);
}

TEST(Quadrature, IntervalPolynomialAndLog) {
  const auto r = integrate_interval([](double x) { return x * x; }, 0.0, 3.0);
  EXPECT_NEAR(r.value, 9.0, 1e-12);
  EXPECT_FALSE(r.diverged);
  const auto l = integrate_interval([](double x) { return 1.0 / x; }, 1.0, std::exp(1.0));
  EXPECT_NEAR(l.value, 1.0, 1e-12);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  const GaussRule g = gauss_legendre(8);
  double sum_w = 0.0;
  double x14 = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    sum_w += g.weights[i];
    x14 += g.weights[i] * std::pow(g.nodes[i], 14);
  }
  EXPECT_NEAR(sum_w, 2.0, 1e-14);
  EXPECT_NEAR(x14, 2.0 / 15.0, 1e-14);
}

TEST(Quadrature, VolumesOfCatalogDomains) {
  auto one = [](std::span<const double>) { return 1.0; };
  EXPECT_NEAR(integrate_over(Ball{{0, 0}, 2.0}, one).value, 4 * kPi, 1e-7);
  EXPECT_NEAR(integrate_over(Ball{{1, 2, 3}, 1.0}, one).value, 4 * kPi / 3, 1e-7);
  EXPECT_NEAR(integrate_over(Box{{0, 0}, {2, 3}}, one).value, 6.0, 1e-9);
  EXPECT_NEAR(integrate_over(Annulus{{0, 0}, 1.0, 2.0}, one).value, 3 * kPi, 1e-7);
}

TEST(Quadrature, WeightedBallClosedForm) {
  // Integral of (1 + |x|^2)^{-2} over the unit disk is pi/2.
  auto w = [](std::span<const double> x) {
    const double s = 1.0 + x[0] * x[0] + x[1] * x[1];
    return 1.0 / (s * s);
  };
  EXPECT_NEAR(integrate_over(Ball{{0, 0}, 1.0}, w).value, kPi / 2, 1e-8);
}

TEST(Quadrature, QuasiMonteCarloInFourDimensions) {
  auto one = [](std::span<const double>) { return 1.0; };
  auto r2 = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  const double vol = kPi * kPi / 2;
  EXPECT_NEAR(integrate_over(Ball{{0, 0, 0, 0}, 1.0}, one).value, vol, 1e-3 * vol);
  // Integral of |x|^2 over B^4 is omega_3 / 6 = pi^2 / 3.
  EXPECT_NEAR(integrate_over(Ball{{0, 0, 0, 0}, 1.0}, r2).value, kPi * kPi / 3, 2e-3);
}

TEST(Quadrature, SphereIntegrals) {
  auto one = [](std::span<const double>) { return 1.0; };
  EXPECT_NEAR(integrate_sphere(2, one).value, 2 * kPi, 1e-9);
  EXPECT_NEAR(integrate_sphere(3, one).value, 4 * kPi, 1e-9);
  auto z2 = [](std::span<const double> u) { return u[2] * u[2]; };
  EXPECT_NEAR(integrate_sphere(3, z2).value, 4 * kPi / 3, 1e-9);
}

TEST(Quadrature, SobolPointsAreDeterministicAndInUnitCube) {
  const auto a = sobol_points(5, 1024);
  const auto b = sobol_points(5, 1024);
  ASSERT_EQ(a.size(), 5u * 1024u);
  EXPECT_EQ(a, b);
  for (double v : a) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Table, NumberFormatting) {
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_number(std::numbers::pi)), std::numbers::pi);
}

TEST(Table, CsvRowsMustMatchHeader) {
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
  EXPECT_EQ(t.str(), "a,b\n1,2\n");
}

TEST(Table, AtomicWriteLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "qmod_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";
  write_file_atomic(path, "x\n1\n");
  std::ifstream in(path);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(s, "x\n1\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "f.csv", "x"), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace qmod
