#include "lsqstab/errors.hpp"
#include "lsqstab/sampling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace lsqstab;

TEST(Sampling, SameSeedSamePoints) {
  const SampleSet a = draw_iid(Measure::chebyshev(), 100, 42);
  const SampleSet b = draw_iid(Measure::chebyshev(), 100, 42);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, draw_iid(Measure::chebyshev(), 100, 43).points);
  EXPECT_EQ(a.origin, SampleOrigin::Random);
  EXPECT_EQ(a.seed, 42u);
}

TEST(Sampling, PrefixStability) {
  // One uniform per point: a longer draw extends a shorter one.
  const SampleSet a = draw_iid(Measure::uniform(), 10, 5);
  const SampleSet b = draw_iid(Measure::uniform(), 20, 5);
  EXPECT_TRUE(std::equal(a.points.begin(), a.points.end(), b.points.begin()));
}

TEST(Sampling, PointsInSupport) {
  for (const Measure& mu : {Measure::uniform(), Measure::chebyshev(), Measure::shrunk(0.05)}) {
    for (double x : draw_iid(mu, 2000, 1).points) {
      EXPECT_GE(x, mu.lower());
      EXPECT_LE(x, mu.upper());
    }
  }
}

TEST(Sampling, ChebyshevMomentsStatistical) {
  // E[x^2] = 1/2 with variance Var(x^2) = 1/8 under the arcsine law.
  const SampleSet s = draw_iid(Measure::chebyshev(), 20000, 42);
  double m2 = 0;
  for (double x : s.points) m2 += x * x;
  m2 /= s.n();
  EXPECT_NEAR(m2, 0.5, 5 * std::sqrt(0.125 / s.n()));
}

TEST(Sampling, DeterministicSchemes) {
  const SampleSet t = deterministic_points(BasisFamily::trigonometric(), 4);
  ASSERT_EQ(t.n(), 4);
  EXPECT_NEAR(t.points[0], -std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(t.points[3], std::numbers::pi, 1e-15);
  EXPECT_EQ(t.origin, SampleOrigin::Deterministic);

  const SampleSet l = deterministic_points(BasisFamily::legendre(), 4);
  EXPECT_NEAR(l.points[0], -0.75, 1e-15);
  EXPECT_NEAR(l.points[3], 0.75, 1e-15);

  const SampleSet c = deterministic_points(BasisFamily::chebyshev(), 3);
  EXPECT_NEAR(c.points[0], -std::cos(std::numbers::pi / 6), 1e-15);
  EXPECT_NEAR(c.points[1], 0.0, 1e-15);
  EXPECT_TRUE(std::is_sorted(c.points.begin(), c.points.end()));

  const BasisFamily pc = BasisFamily::piecewise_constant({-1.0, 0.0, 0.5, 1.0});
  const SampleSet p = deterministic_points(pc, 3);
  EXPECT_NEAR(p.points[1], 0.25, 1e-15);
  EXPECT_THROW(deterministic_points(pc, 4), InvalidArgument);
}
