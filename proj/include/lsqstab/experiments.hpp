/**
 * @file experiments.hpp
 * @brief Monte Carlo drivers: error-vs-m curves, the optimal m(n) study, bound
 *        dominance checks for the noiseless and noisy estimators, and the
 *        deterministic-sampling stability table.
 *
 * Every driver takes a base seed. Trial t draws its points from
 * trial_seed(seed, t) (further split per sample size and per noise stream), so a
 * run is reproducible and independent of how trials are spread over workers.
 */
#pragma once

#include "lsqstab/bases.hpp"
#include "lsqstab/estimator.hpp"
#include "lsqstab/quadrature.hpp"
#include "lsqstab/rng.hpp"
#include "lsqstab/stability.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsqstab {

struct TargetFunction {
  std::string label;
  ScalarFunction eval;
  /// L with |f(x)| <= L on the domain; also the truncation level of the estimator.
  double sup_bound = 1.0;
};

/// f1(x) = 1/(1+25x^2), L = 1.
TargetFunction runge_target();
/// f2(x) = |x|, L = 1.
TargetFunction abs_target();
/// f = 0 with L = 1 (isolates the noise term).
TargetFunction zero_target();
/// "f1"/"runge", "f2"/"abs", "zero".
TargetFunction parse_target(std::string_view label);

/// Spot-checks |f| <= L on a uniform grid of the family domain.
bool sup_bound_holds(const TargetFunction& f, const BasisFamily& family, int grid = 2001);

struct ExperimentRecord {
  std::string experiment;
  std::string family;
  std::string measure;
  std::string f;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  int trial = 0;
  double error = 0.0;
  double gap = 0.0;
  std::map<std::string, double> bounds;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// One sample set of size n drawn from the family measure and reused for every m.
/// Each fit is truncated at f.sup_bound; error is the L2(rho) error by adaptive Simpson.
/// Error integrals that hit the evaluation cap (only near-singular fits, whose values are
/// dominated by rounding noise) keep their estimate; the bounds entry "quad_unresolved"
/// carries the unresolved error mass.
std::vector<ExperimentRecord> error_vs_m_curve(const TargetFunction& f, const BasisFamily& family, int n,
                                               const std::vector<int>& m_values, std::uint64_t seed,
                                               const QuadratureSpec& quad = {}, int jobs = 1);

/// First m (in curve order) whose error exceeds `factor` times the minimum error seen before it.
std::optional<int> instability_onset(const std::vector<ExperimentRecord>& curve, double factor = 10.0);

struct OptimalMRow {
  int n = 0;
  /// argmin m per resolved trial.
  std::vector<double> m_per_trial;
  int unresolved = 0;
  double mean_m = 0.0;
  double stderr_m = 0.0;
};

struct OptimalMTable {
  std::vector<OptimalMRow> rows;
  std::vector<ExperimentRecord> records;
};

struct OptimalMOptions {
  int trials = 50;
  /// Absolute tolerance on the squared error integral.
  QuadratureSpec quad{1e-12, 50, 5, 200'000};
  /// Trials whose best error is below this value are marked unresolved.
  double resolution_floor = 1e-14;
  int jobs = 1;
};

/// For each n and trial: m(n) = argmin over admissible m <= n of the truncated
/// L2 error (ties toward the smaller m); averaged over resolved trials.
OptimalMTable optimal_m_curve(const TargetFunction& f, const BasisFamily& family, const std::vector<int>& n_values,
                              std::uint64_t seed, const OptimalMOptions& options = {});

/// Recomputes mean and standard error of a row from its per-trial values.
void summarize_row(OptimalMRow& row);

struct ScalingFit {
  double slope = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::vector<int> n_used;
};

/// OLS slope of log mean m(n) against log n over the upper half of the n grid,
/// with a percentile bootstrap interval obtained by resampling trials within each n.
ScalingFit scaling_exponent(const OptimalMTable& table, int bootstrap = 1000, std::uint64_t seed = kDefaultSeed);

struct BoundSweepRow {
  int m = 0;
  double e_m = 0.0;
  double bound = 0.0;
  double mean = 0.0;      ///< Monte Carlo mean of ||f - f~||^2
  double ci_half = 0.0;   ///< 1.96 standard errors
  bool dominated = false; ///< mean - ci_half <= bound
};

struct BoundReport {
  std::string experiment;
  CheckStatus status = CheckStatus::Inapplicable;
  int n = 0;
  int budget = 0;  ///< m = stability_budget(family, n, r)
  double r = 1.0;
  double sigma = 0.0;
  double eps_n = 0.0;
  /// Rows for m = budget (noiseless) or every admissible m <= budget (noisy).
  std::vector<BoundSweepRow> rows;
  std::vector<ExperimentRecord> records;

  const BoundSweepRow* at_budget() const;
};

struct BoundOptions {
  int trials = 200;
  QuadratureSpec quad{1e-10, 50, 5};
  /// Tolerance for the e_m(f) quadrature oracle.
  double projection_tol = 1e-12;
  NoiseModel noise = NoiseModel::Gaussian;
  int jobs = 1;
};

/// eps(n) = 4 kappa / log n.
double epsilon_n(int n, double r);
/// (1 + eps(n)) e_m^2 + 8 L^2 n^{-r}.
double noiseless_bound(double e_m, double sup_bound, int n, double r);
/// (1 + 2 eps(n)) e_m^2 + 8 L^2 n^{-r} + 8 sigma^2 m / n.
double noisy_bound(double e_m, double sup_bound, int n, double r, double sigma, int m);

BoundReport noiseless_bound_experiment(const TargetFunction& f, const BasisFamily& family, int n, double r,
                                       std::uint64_t seed, const BoundOptions& options = {});

/// As the noiseless experiment with observation noise of standard deviation sigma, and
/// swept over every admissible m up to the budget.
BoundReport noisy_bound_experiment(const TargetFunction& f, const BasisFamily& family, int n, double r, double sigma,
                                   std::uint64_t seed, const BoundOptions& options = {});

struct DeterministicGapRow {
  int n = 0;
  int m = 0;
  double gap = 0.0;
  /// Proved bound on |||G - I|||: 2(m-1)^2/n (Legendre), pi(m-1)/n (Chebyshev), 0 (trig, piecewise constants).
  double bound = 0.0;
  /// Rounding allowance used only where the bound is an identity (1e-12 trig, 1e-14 piecewise constants).
  double allowance = 0.0;
  bool pass = false;
};

/// Proved deterministic-sampling bound for the family, or nullopt where none exists.
/// Piecewise constants qualify only for n = cells and an equal-measure partition.
std::optional<double> deterministic_gap_bound(const BasisFamily& family, int n, int m);

/// |||G - I||| at deterministic_points(family, n) for each admissible (n, m) with m <= n.
std::vector<DeterministicGapRow> deterministic_stability_table(const BasisFamily& family,
                                                               const std::vector<int>& n_values,
                                                               const std::vector<int>& m_values, int jobs = 1);

}  // namespace lsqstab
