#include "lsqstab/errors.hpp"
#include "lsqstab/measure.hpp"
#include "lsqstab/quadrature.hpp"
#include "lsqstab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lsqstab;

TEST(Measure, ChebyshevInverseCdfEndpointsAndMedian) {
  const Measure mu = Measure::chebyshev();
  EXPECT_DOUBLE_EQ(mu.inverse_cdf(0.0), -1.0);
  EXPECT_DOUBLE_EQ(mu.inverse_cdf(1.0), 1.0);
  EXPECT_NEAR(mu.inverse_cdf(0.5), 0.0, 1e-16);
  EXPECT_THROW(mu.inverse_cdf(1.5), DomainError);
  EXPECT_THROW(mu.inverse_cdf(-0.1), DomainError);
}

TEST(Measure, CdfInvertsInverseCdf) {
  Rng rng(7);
  for (const Measure& mu : {Measure::uniform(), Measure::chebyshev(), Measure::shrunk(0.1)}) {
    for (int i = 0; i < 500; ++i) {
      const double u = rng.uniform();
      EXPECT_NEAR(mu.cdf(mu.inverse_cdf(u)), u, 1e-12) << mu.name();
    }
  }
}

TEST(Measure, ShrunkSupport) {
  const Measure mu = Measure::shrunk(0.01);
  EXPECT_DOUBLE_EQ(mu.lower(), -0.01);
  EXPECT_DOUBLE_EQ(mu.upper(), 0.01);
  EXPECT_DOUBLE_EQ(mu.epsilon(), 0.01);
  EXPECT_THROW(Measure::shrunk(0.0), InvalidArgument);
}

TEST(Measure, Parse) {
  EXPECT_EQ(parse_measure("uniform"), Measure::uniform());
  EXPECT_EQ(parse_measure("chebyshev"), Measure::chebyshev());
  EXPECT_EQ(parse_measure("shrunk:0.25").epsilon(), 0.25);
  EXPECT_THROW(parse_measure("gauss"), InvalidArgument);
}

TEST(Quadrature, PolynomialIsExact) {
  const QuadratureResult r = adaptive_simpson([](double x) { return x * x * x - 2 * x + 1; }, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 3.75, 1e-13);
}

TEST(Quadrature, KinkedIntegrand) {
  QuadratureSpec spec;
  spec.tol = 1e-12;
  const QuadratureResult r = adaptive_simpson([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, spec);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-11);
}

TEST(Quadrature, ChebyshevMeasureMoments) {
  // E[x^2] = 1/2 and E[|x|] = 2/pi under the arcsine law.
  const QuadratureSpec spec{1e-13};
  EXPECT_NEAR(integrate_or_throw(Measure::chebyshev(), [](double x) { return x * x; }, spec), 0.5, 1e-12);
  EXPECT_NEAR(integrate_or_throw(Measure::chebyshev(), [](double x) { return std::abs(x); }, spec),
              0.636619772367581343, 1e-12);
}

TEST(Quadrature, RungeNormOracles) {
  const auto f1sq = [](double x) { return 1.0 / ((1.0 + 25.0 * x * x) * (1.0 + 25.0 * x * x)); };
  const QuadratureSpec spec{1e-14};
  EXPECT_NEAR(integrate_or_throw(Measure::uniform(), f1sq, spec), 0.156570845925270817, 1e-13);
  EXPECT_NEAR(integrate_or_throw(Measure::chebyshev(), f1sq, spec), 0.101829531706364786, 1e-13);
}

TEST(Quadrature, NonConvergenceIsReported) {
  QuadratureSpec spec;
  spec.tol = 1e-30;
  spec.max_depth = 8;
  const QuadratureResult r = adaptive_simpson([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, spec);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.unresolved, 0.0);
  EXPECT_THROW(integrate_or_throw(Measure::uniform(), [](double x) { return std::sqrt(std::abs(x)); }, spec),
               QuadratureError);
}

TEST(Quadrature, EvaluationCapStopsNoisyIntegrands) {
  // Rounding-level noise never satisfies a shrinking local tolerance.
  QuadratureSpec spec;
  spec.tol = 1e-15;
  spec.max_evaluations = 20000;
  Rng rng(3);
  const QuadratureResult r = adaptive_simpson([&](double x) { return x * x + 1e-6 * rng.uniform(); }, 0.0, 1.0, spec);
  EXPECT_LT(r.evaluations, 20400u);
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-5);
}

TEST(Quadrature, AbortAboveThreshold) {
  const QuadratureResult r =
      adaptive_simpson([](double x) { return x * x; }, 0.0, 3.0, QuadratureSpec{}, 1.0);
  EXPECT_TRUE(r.aborted);
  EXPECT_GT(r.value, 1.0);
  EXPECT_LT(r.value, 9.0);
}

TEST(Quadrature, LinearityProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform() * 4 - 2;
    const double b = rng.uniform() * 4 - 2;
    const double s = rng.uniform() * 3 + 0.1;
    auto g = [&](double x) { return a * std::cos(s * x) + b * std::exp(x); };
    const double v = adaptive_simpson(g, -1.0, 1.0, QuadratureSpec{1e-12}).value;
    const double exact = a * 2.0 * std::sin(s) / s + b * (std::exp(1.0) - std::exp(-1.0));
    EXPECT_NEAR(v, exact, 1e-10);
  }
}
