#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qmod/chordal.hpp"

namespace qmod {
namespace {

// Independent oracle: the chord between stereographic images on the sphere
// of diameter 1 centred at (0, ..., 0, 1/2).
std::vector<double> stereographic(const ExtendedPoint& x, int n) {
  std::vector<double> s(n + 1, 0.0);
  if (x.is_infinity()) {
    s[n] = 1.0;
    return s;
  }
  double r2 = 0.0;
  for (double v : x.coords()) r2 += v * v;
  for (int i = 0; i < n; ++i) s[i] = x.coords()[i] / (1.0 + r2);
  s[n] = r2 / (1.0 + r2);
  return s;
}

double chord(const ExtendedPoint& x, const ExtendedPoint& y, int n) {
  const auto a = stereographic(x, n);
  const auto b = stereographic(y, n);
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

ExtendedPoint random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  if (pick(rng) < 0.1) return ExtendedPoint::infinity();
  std::normal_distribution<double> g(0.0, 1.0);
  const double scale = std::pow(10.0, 4.0 * pick(rng) - 2.0);
  Point p(n);
  for (double& v : p) v = scale * g(rng);
  return ExtendedPoint(p);
}

TEST(Chordal, Examples) {
  const ExtendedPoint origin({0.0, 0.0});
  const ExtendedPoint inf = ExtendedPoint::infinity();
  EXPECT_DOUBLE_EQ(chordal_distance(origin, inf), 1.0);
  EXPECT_DOUBLE_EQ(chordal_distance(origin, origin), 0.0);
  EXPECT_DOUBLE_EQ(chordal_distance(inf, inf), 0.0);
  EXPECT_DOUBLE_EQ(chordal_distance(ExtendedPoint({1.0, 0.0}), ExtendedPoint({-1.0, 0.0})), 1.0);
}

TEST(Chordal, RejectsNonFiniteCoordinates) {
  EXPECT_THROW(ExtendedPoint({1.0, INFINITY}), std::invalid_argument);
}

TEST(Chordal, MatchesStereographicChord) {
  std::mt19937_64 rng(7);
  for (int n : {2, 3, 5}) {
    for (int k = 0; k < 2000; ++k) {
      const auto x = random_point(rng, n);
      const auto y = random_point(rng, n);
      EXPECT_NEAR(chordal_distance(x, y), chord(x, y, n), 1e-12);
    }
  }
}

TEST(Chordal, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10000; ++k) {
    const int n = 2 + k % 3;
    const auto x = random_point(rng, n);
    const auto y = random_point(rng, n);
    const auto z = random_point(rng, n);
    const double xy = chordal_distance(x, y);
    EXPECT_EQ(xy, chordal_distance(y, x));
    EXPECT_GE(xy, 0.0);
    EXPECT_LE(xy, 1.0);
    EXPECT_LE(xy, chordal_distance(x, z) + chordal_distance(z, y) + 1e-12);
  }
}

TEST(Chordal, Diameter) {
  const ExtendedPoint origin({0.0, 0.0});
  EXPECT_DOUBLE_EQ(chordal_diameter({origin, ExtendedPoint::infinity()}), 1.0);
  EXPECT_DOUBLE_EQ(chordal_diameter({origin}), 0.0);
  EXPECT_DOUBLE_EQ(chordal_diameter({origin, ExtendedPoint({1.0, 0.0}), ExtendedPoint({-1.0, 0.0})}), 1.0);
}

TEST(Chordal, DiameterIsMonotoneUnderInclusion) {
  std::mt19937_64 rng(3);
  PointSample s;
  double last = 0.0;
  for (int k = 0; k < 50; ++k) {
    s.push_back(random_point(rng, 3));
    const double d = chordal_diameter(s);
    EXPECT_GE(d, last);
    last = d;
  }
}

TEST(Chordal, SetDistance) {
  const ExtendedPoint origin({0.0, 0.0});
  const ExtendedPoint e1({1.0, 0.0});
  const ExtendedPoint two({2.0, 0.0});
  EXPECT_DOUBLE_EQ(chordal_set_distance({origin}, {origin}), 0.0);
  EXPECT_DOUBLE_EQ(chordal_set_distance({origin}, {ExtendedPoint::infinity()}), 1.0);
  EXPECT_DOUBLE_EQ(chordal_set_distance({origin, e1}, {two}), chordal_distance(e1, two));
}

TEST(Chordal, EuclideanDiameter) {
  EXPECT_DOUBLE_EQ(euclidean_diameter({{0, 0}, {3, 4}, {1, 1}}), 5.0);
}

}  // namespace
}  // namespace qmod
