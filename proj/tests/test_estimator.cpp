#include "lsqstab/errors.hpp"
#include "lsqstab/estimator.hpp"
#include "lsqstab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lsqstab;

namespace {
std::vector<double> values(const ScalarFunction& f, const SampleSet& s) {
  std::vector<double> y;
  for (double x : s.points) y.push_back(f(x));
  return y;
}
}  // namespace

TEST(Estimator, TruncateClamps) {
  EXPECT_EQ(truncate(0.3, 1.0), 0.3);
  EXPECT_EQ(truncate(5.0, 1.0), 1.0);
  EXPECT_EQ(truncate(-5.0, 2.0), -2.0);
  EXPECT_THROW(truncate(1.0, 0.0), InvalidArgument);
}

TEST(Estimator, ExactRecoveryOfPolynomial) {
  const BasisFamily fam = BasisFamily::legendre();
  auto p = [](double x) { return 0.5 - x + 0.25 * x * x; };
  const SampleSet s = draw_iid(fam.measure(), 40, 42);
  const FitResult fit = fit_least_squares(fam, 3, s, values(p, s));
  EXPECT_FALSE(fit.singular);
  EXPECT_LT(l2_error(p, fit, QuadratureSpec{1e-14}), 1e-10);
}

TEST(Estimator, SingularGramGivesZero) {
  const BasisFamily fam = BasisFamily::legendre();
  const SampleSet s = draw_iid(fam.measure(), 3, 1);
  const FitResult fit = fit_least_squares(fam, 6, s, std::vector<double>{1.0, 2.0, 3.0});
  EXPECT_TRUE(fit.singular);
  for (double c : fit.coeffs.coeffs) EXPECT_EQ(c, 0.0);
}

TEST(Estimator, LengthMismatchRejected) {
  const BasisFamily fam = BasisFamily::legendre();
  const SampleSet s = draw_iid(fam.measure(), 5, 1);
  EXPECT_THROW(fit_least_squares(fam, 2, s, std::vector<double>{1.0}), InvalidArgument);
}

TEST(Estimator, TruncatedErrorNeverWorse) {
  // T_L is a contraction toward [-L, L] and |f| <= L, so truncation cannot increase the error.
  const BasisFamily fam = BasisFamily::legendre();
  auto f = [](double x) { return 1.0 / (1.0 + 25.0 * x * x); };
  for (int t = 0; t < 10; ++t) {
    const SampleSet s = draw_iid(fam.measure(), 40, trial_seed(42, t));
    const FitResult fit = fit_least_squares(fam, 30, s, values(f, s));
    EXPECT_LE(l2_error(f, fit.truncated_at(1.0)), l2_error(f, fit) + 1e-12);
  }
}

TEST(Estimator, NoiseMomentsAndDeterminism) {
  const std::vector<double> clean(20000, 0.0);
  for (NoiseModel model : {NoiseModel::Gaussian, NoiseModel::Uniform, NoiseModel::Rademacher}) {
    const auto y = add_noise(clean, 0.3, 9, model);
    double m = 0, v = 0;
    for (double e : y) m += e;
    m /= y.size();
    for (double e : y) v += (e - m) * (e - m);
    v /= y.size() - 1;
    EXPECT_NEAR(m, 0.0, 5 * 0.3 / std::sqrt(20000.0));
    EXPECT_NEAR(v, 0.09, 0.09 * 0.06);
    EXPECT_EQ(y, add_noise(clean, 0.3, 9, model));
  }
  EXPECT_EQ(add_noise(std::vector<double>{1.0, 2.0}, 0.0, 1), (std::vector<double>{1.0, 2.0}));
}

// Nested solutions agree with independent per-m fits.
TEST(EstimatorProperty, NestedMatchesDirect) {
  auto f = [](double x) { return std::abs(x); };
  for (const BasisFamily& fam : {BasisFamily::legendre(), BasisFamily::chebyshev()}) {
    for (int t = 0; t < 5; ++t) {
      const SampleSet s = draw_iid(fam.measure(), 60, trial_seed(7, t));
      const auto y = values(f, s);
      const NestedLeastSquares nested(fam, 25, s, y);
      for (int m = 1; m <= 25; ++m) {
        const FitResult a = fit_least_squares(fam, m, s, y);
        const FitResult b = nested.fit(m);
        ASSERT_EQ(a.singular, b.singular) << m;
        if (a.singular) continue;
        if (nested.certified_regular(m)) {
          EXPECT_TRUE(!a.spectrum.singular());
        }
        const double scale = 1e-9 * (1.0 + a.coeffs.norm()) / a.spectrum.lambda_min;
        for (int k = 0; k < m; ++k) EXPECT_NEAR(a.coeffs.coeffs[k], b.coeffs.coeffs[k], scale);
      }
    }
  }
}

TEST(EstimatorProperty, StabilityConstantWithinSmallGap) {
  // ||w|| <= sqrt(6) ||y||_n whenever |||G - I||| <= 1/2, for arbitrary data.
  Rng rng(21);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const BasisFamily fam = (t % 2) ? BasisFamily::legendre() : BasisFamily::chebyshev();
    const int m = 1 + static_cast<int>(rng() % 5);
    const SampleSet s = draw_iid(fam.measure(), 200, rng());
    std::vector<double> y(200);
    for (double& v : y) v = rng.normal() * 3;
    const GramSystem g = build_gram(fam, m, s, y);
    const FitResult fit = fit_gram_system(fam, g);
    const StabilityCheck c = stability_constant_check(g, fit.coeffs, y);
    if (c.status == CheckStatus::Inapplicable) continue;
    ++checked;
    EXPECT_EQ(c.status, CheckStatus::Holds);
  }
  EXPECT_GT(checked, 100);
}
