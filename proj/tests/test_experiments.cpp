#include "lsqstab/errors.hpp"
#include "lsqstab/experiments.hpp"
#include "lsqstab/sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lsqstab;

TEST(Targets, SupBoundsHold) {
  for (const char* label : {"f1", "f2", "zero"}) {
    EXPECT_TRUE(sup_bound_holds(parse_target(label), BasisFamily::legendre())) << label;
  }
  EXPECT_THROW(parse_target("f3"), InvalidArgument);
  TargetFunction bad{"bad", [](double x) { return 2 * x; }, 1.0};
  EXPECT_FALSE(sup_bound_holds(bad, BasisFamily::legendre()));
}

TEST(Experiments, EpsilonOracle) {
  EXPECT_NEAR(epsilon_n(10000, 1.0), 0.0333161215598177, 1e-15);
  EXPECT_NEAR(epsilon_n(200, 1.0), 0.0579151451699420655, 1e-15);
  EXPECT_NEAR(epsilon_n(1000, 1.0), 0.0444214954130902108, 1e-15);
}

TEST(Experiments, BoundFormulas) {
  EXPECT_NEAR(noiseless_bound(0.1, 1.0, 1000, 1.0), 1.0444214954130902 * 0.01 + 0.008, 1e-15);
  EXPECT_NEAR(noisy_bound(0.1, 1.0, 1000, 1.0, 0.2, 6), 1.0888429908261804 * 0.01 + 0.008 + 8 * 0.04 * 6 / 1000.0,
              1e-15);
}

TEST(Experiments, ErrorVsMFirstPointIsConstantFit) {
  const auto curve = error_vs_m_curve(runge_target(), BasisFamily::legendre(), 200, {1, 2, 3}, 42);
  ASSERT_EQ(curve.size(), 3u);
  // e_1(f1) under dx/2 is sqrt(||f||^2 - mean^2) with mean = atan(5)/5.
  const double mean = std::atan(5.0) / 5.0;
  const double e1 = std::sqrt(0.156570845925270817 - mean * mean);
  EXPECT_NEAR(curve[0].error, e1, 0.05);
  EXPECT_GE(curve[0].error, e1 - 1e-12);
  EXPECT_EQ(curve[0].gap, 0.0);
  for (const auto& r : curve) {
    EXPECT_EQ(r.experiment, "error-vs-m");
    EXPECT_EQ(r.f, "f1");
    EXPECT_TRUE(std::isfinite(r.error) && std::isfinite(r.gap));
  }
}

TEST(Experiments, ErrorVsMIndependentOfJobs) {
  std::vector<int> ms;
  for (int m = 1; m <= 40; ++m) ms.push_back(m);
  EXPECT_EQ(error_vs_m_curve(abs_target(), BasisFamily::chebyshev(), 60, ms, 3, {}, 1),
            error_vs_m_curve(abs_target(), BasisFamily::chebyshev(), 60, ms, 3, {}, 4));
}

TEST(Experiments, InstabilityOnset) {
  std::vector<ExperimentRecord> c(5);
  const double errs[] = {1.0, 0.1, 0.05, 0.4, 0.6};
  for (int i = 0; i < 5; ++i) {
    c[i].m = i + 1;
    c[i].error = errs[i];
  }
  EXPECT_EQ(instability_onset(c), std::optional<int>(5));
  EXPECT_EQ(instability_onset(c, 5.0), std::optional<int>(4));
  EXPECT_EQ(instability_onset(c, 100.0), std::nullopt);
}

TEST(Experiments, OptimalMForNOne) {
  OptimalMOptions opt;
  opt.trials = 3;
  const OptimalMTable t = optimal_m_curve(abs_target(), BasisFamily::legendre(), {1}, 42, opt);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].mean_m, 1.0);
  EXPECT_EQ(t.records.size(), 3u);
}

// The fast argmin (nested Cholesky, early-abort quadrature, certificate) equals a brute-force scan.
TEST(ExperimentsProperty, OptimalMMatchesBruteForce) {
  const TargetFunction f = runge_target();
  const BasisFamily fam = BasisFamily::legendre();
  const int n = 60;
  OptimalMOptions opt;
  opt.trials = 4;
  const OptimalMTable t = optimal_m_curve(f, fam, {n}, 42, opt);
  for (int trial = 0; trial < 4; ++trial) {
    const SampleSet s = draw_iid(fam.measure(), n, substream_seed(trial_seed(42, trial), n));
    std::vector<double> y;
    for (double x : s.points) y.push_back(f.eval(x));
    double best = 1e300;
    int best_m = 0;
    for (int m = 1; m <= n; ++m) {
      const double e = l2_error(f.eval, fit_least_squares(fam, m, s, y).truncated_at(1.0), QuadratureSpec{1e-13});
      if (e < best) {
        best = e;
        best_m = m;
      }
    }
    EXPECT_EQ(t.records[trial].m, best_m) << "trial " << trial;
    EXPECT_NEAR(t.records[trial].error, best, 1e-6 * best + 1e-9);
  }
}

TEST(Experiments, OptimalMUnresolvedBelowFloor) {
  OptimalMOptions opt;
  opt.trials = 2;
  opt.resolution_floor = 1e-14;
  TargetFunction line{"line", [](double x) { return 0.5 * x; }, 1.0};
  const OptimalMTable t = optimal_m_curve(line, BasisFamily::legendre(), {20}, 42, opt);
  EXPECT_EQ(t.rows[0].unresolved, 2);
  EXPECT_TRUE(t.rows[0].m_per_trial.empty());
}

namespace {
OptimalMTable synthetic(double (*law)(double)) {
  OptimalMTable t;
  for (int n : {10, 20, 40, 80, 160, 320, 640}) {
    OptimalMRow row;
    row.n = n;
    row.m_per_trial = {law(n), law(n)};
    summarize_row(row);
    t.rows.push_back(row);
  }
  return t;
}
}  // namespace

TEST(Experiments, ScalingExponentSynthetic) {
  const ScalingFit sq = scaling_exponent(synthetic([](double n) { return std::sqrt(n); }), 200);
  EXPECT_NEAR(sq.slope, 0.5, 1e-12);
  EXPECT_NEAR(sq.ci_lower, 0.5, 1e-12);
  EXPECT_NEAR(sq.ci_upper, 0.5, 1e-12);
  EXPECT_EQ(sq.n_used, (std::vector<int>{80, 160, 320, 640}));
  EXPECT_NEAR(scaling_exponent(synthetic([](double n) { return 0.1 * n; })).slope, 1.0, 1e-12);
}

TEST(Experiments, ScalingExponentDegenerate) {
  OptimalMTable t = synthetic([](double n) { return std::sqrt(n); });
  t.rows.resize(4);
  EXPECT_THROW(scaling_exponent(t), InvalidArgument);
  OptimalMTable z = synthetic([](double) { return 0.5; });
  EXPECT_THROW(scaling_exponent(z), InvalidArgument);
}

TEST(Experiments, NoiselessExactRecovery) {
  TargetFunction quad{"quad", [](double x) { return 0.5 * x * x; }, 1.0};
  BoundOptions opt;
  opt.trials = 20;
  // Chebyshev budget at n = 1000 is 6 >= 3, so x^2 lies in V_m.
  const BoundReport rep = noiseless_bound_experiment(quad, BasisFamily::chebyshev(), 1000, 1.0, 42, opt);
  ASSERT_EQ(rep.status, CheckStatus::Holds);
  EXPECT_EQ(rep.budget, 6);
  EXPECT_LT(rep.at_budget()->mean, 1e-20);
  EXPECT_LT(rep.at_budget()->e_m, 1e-6);
}

TEST(Experiments, InapplicableWhenBudgetZero) {
  const BoundReport rep = noiseless_bound_experiment(runge_target(), BasisFamily::legendre(), 10, 1.0, 42);
  EXPECT_EQ(rep.status, CheckStatus::Inapplicable);
  EXPECT_TRUE(rep.records.empty());
}

TEST(Experiments, NoisyWithZeroSigmaMatchesNoiseless) {
  BoundOptions opt;
  opt.trials = 30;
  const BoundReport a = noiseless_bound_experiment(abs_target(), BasisFamily::chebyshev(), 1000, 1.0, 42, opt);
  const BoundReport b = noisy_bound_experiment(abs_target(), BasisFamily::chebyshev(), 1000, 1.0, 0.0, 42, opt);
  EXPECT_DOUBLE_EQ(a.at_budget()->mean, b.at_budget()->mean);
  EXPECT_EQ(b.rows.size(), 6u);
}

TEST(Experiments, NoisySweepReproducibleAcrossJobs) {
  BoundOptions opt;
  opt.trials = 12;
  opt.jobs = 1;
  const BoundReport a = noisy_bound_experiment(runge_target(), BasisFamily::legendre(), 1000, 1.0, 0.1, 5, opt);
  opt.jobs = 3;
  const BoundReport b = noisy_bound_experiment(runge_target(), BasisFamily::legendre(), 1000, 1.0, 0.1, 5, opt);
  EXPECT_EQ(a.records, b.records);
}

TEST(Experiments, DeterministicTableExamples) {
  const auto trig = deterministic_stability_table(BasisFamily::trigonometric(), {21}, {21});
  ASSERT_EQ(trig.size(), 1u);
  EXPECT_LE(trig[0].gap, 1e-12);
  EXPECT_TRUE(trig[0].pass);

  const auto leg = deterministic_stability_table(BasisFamily::legendre(), {256}, {5});
  EXPECT_DOUBLE_EQ(leg[0].bound, 0.125);
  EXPECT_LT(leg[0].gap, 0.125);

  const auto che = deterministic_stability_table(BasisFamily::chebyshev(), {1000}, {50});
  EXPECT_NEAR(che[0].bound, std::numbers::pi * 49 / 1000, 1e-15);
  EXPECT_LE(che[0].gap, che[0].bound);

  const BasisFamily pc = BasisFamily::piecewise_constant({-1.0, -0.5, 0.0, 0.5, 1.0});
  const auto p = deterministic_stability_table(pc, {4}, {4});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_LE(p[0].gap, 1e-14);
  // Uneven cells: one point per cell no longer reproduces the norm, so no bound applies.
  const BasisFamily uneven = BasisFamily::piecewise_constant({-1.0, -0.2, 0.1, 0.9, 1.0});
  EXPECT_TRUE(deterministic_stability_table(uneven, {4}, {4}).empty());

  EXPECT_TRUE(deterministic_stability_table(BasisFamily::legendre(), {4}, {5}).empty());
}
