#include "lsqstab/experiments.hpp"

#include "lsqstab/errors.hpp"
#include "lsqstab/parallel.hpp"
#include "lsqstab/rng.hpp"
#include "lsqstab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace lsqstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPointStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::vector<double> evaluate(const ScalarFunction& f, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return y;
}

/// Admissible dimensions 1..cap in increasing order (odd only for the trigonometric family).
std::vector<int> admissible_dims(const BasisFamily& family, int cap) {
  cap = std::min(cap, family.max_dimension());
  const int step = family.kind() == BasisKind::TrigonometricUniform ? 2 : 1;
  std::vector<int> dims;
  for (int m = 1; m <= cap; m += step) dims.push_back(m);
  return dims;
}

ExperimentRecord base_record(std::string experiment, const BasisFamily& family, const TargetFunction& f, int n,
                             int m, std::uint64_t seed, int trial) {
  ExperimentRecord r;
  r.experiment = std::move(experiment);
  r.family = family.name();
  r.measure = family.measure().name();
  r.f = f.label;
  r.n = n;
  r.m = m;
  r.seed = seed;
  r.trial = trial;
  return r;
}

double squared_norm(const TargetFunction& f, const BasisFamily& family, const QuadratureSpec& quad) {
  return integrate_or_throw(family.measure(), [&](double x) { return f.eval(x) * f.eval(x); }, quad);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TargetFunction runge_target() {
  return {"f1", [](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, 1.0};
}

TargetFunction abs_target() {
  return {"f2", [](double x) { return std::abs(x); }, 1.0};
}

TargetFunction zero_target() {
  return {"zero", [](double) { return 0.0; }, 1.0};
}

TargetFunction parse_target(std::string_view label) {
  if (label == "f1" || label == "runge") return runge_target();
  if (label == "f2" || label == "abs") return abs_target();
  if (label == "zero") return zero_target();
  throw InvalidArgument("unknown target function '" + std::string(label) + "' (expected f1, f2 or zero)");
}

bool sup_bound_holds(const TargetFunction& f, const BasisFamily& family, int grid) {
  const double a = family.domain_lower();
  const double b = family.domain_upper();
  for (int i = 0; i < grid; ++i) {
    const double x = a + (b - a) * i / (grid - 1);
    if (!(std::abs(f.eval(x)) <= f.sup_bound)) return false;
  }
  return true;
}

std::vector<ExperimentRecord> error_vs_m_curve(const TargetFunction& f, const BasisFamily& family, int n,
                                               const std::vector<int>& m_values, std::uint64_t seed,
                                               const QuadratureSpec& quad, int jobs) {
  if (m_values.empty()) {
    throw InvalidArgument("error_vs_m_curve: m_values is empty");
  }
  for (int m : m_values) family.check_dimension(m);
  const SampleSet samples = draw_iid(family.measure(), n, seed);
  const std::vector<double> y = evaluate(f.eval, samples.points);

  std::vector<ExperimentRecord> out(m_values.size());
  parallel_for_index(jobs, m_values.size(), [&](std::size_t i) {
    const int m = m_values[i];
    const FitResult fit = fit_least_squares(family, m, samples, y).truncated_at(f.sup_bound);
    ExperimentRecord r = base_record("error-vs-m", family, f, n, m, seed, 0);
    const QuadratureResult q = l2_error_squared(f.eval, fit, quad);
    r.error = std::sqrt(std::max(0.0, q.value));
    r.bounds["quad_unresolved"] = q.unresolved;
    r.gap = fit.gap();
    r.bounds["K_m"] = k_of_m_analytic(family, m);
    r.bounds["singular"] = fit.singular ? 1.0 : 0.0;
    out[i] = std::move(r);
  });
  return out;
}

std::optional<int> instability_onset(const std::vector<ExperimentRecord>& curve, double factor) {
  double running_min = kInf;
  for (const auto& r : curve) {
    if (r.error > factor * running_min) return r.m;
    running_min = std::min(running_min, r.error);
  }
  return std::nullopt;
}

void summarize_row(OptimalMRow& row) {
  if (row.m_per_trial.empty()) {
    row.mean_m = 0.0;
    row.stderr_m = 0.0;
    return;
  }
  row.mean_m = mean_of(row.m_per_trial);
  row.stderr_m = sample_sd(row.m_per_trial, row.mean_m) / std::sqrt(static_cast<double>(row.m_per_trial.size()));
}

namespace {

struct TrialOptimum {
  int m = 0;  // 0: unresolved
  double error = 0.0;
  double gap = 0.0;
  int unconverged = 0;  // error integrals that hit the evaluation cap
};

/// argmin over admissible m <= n of the truncated error for one sample set.
/// Candidates are visited in increasing m; a candidate replaces the incumbent only
/// when strictly better, so ties go to the smaller m. Error integrals abort as soon
/// as they exceed the incumbent, and the exact Jacobi singularity test is only run
/// for blocks the Cholesky certificate cannot clear and that could change the answer.
TrialOptimum optimum_for_samples(const TargetFunction& f, const BasisFamily& family, const SampleSet& samples,
                                 double f_norm_sq, const OptimalMOptions& opt) {
  const int n = samples.n();
  const std::vector<int> dims = admissible_dims(family, n);
  const std::vector<double> y = evaluate(f.eval, samples.points);
  const NestedLeastSquares nested(family, dims.back(), samples, y);

  double best_sq = kInf;
  int best_m = 0;
  int unconverged = 0;
  auto consider = [&](int m, double err_sq) {
    if (err_sq < best_sq) {
      best_sq = err_sq;
      best_m = m;
    }
  };

  for (int m : dims) {
    if (m > nested.factored()) {
      // Singular from here on (eigenvalue interlacing): every remaining fit is w = 0.
      consider(m, f_norm_sq);
      break;
    }
    const bool certified = nested.certified_regular(m);
    FitResult fit{CoefficientVector{family, nested.coefficients(m)}, false, f.sup_bound, GramSpectrum{}};
    const QuadratureResult r = l2_error_squared(f.eval, fit, opt.quad, best_sq);
    if (!r.aborted && !r.converged) ++unconverged;
    const double regular_sq = r.aborted ? kInf : std::max(0.0, r.value);
    const bool could_win = regular_sq < best_sq || (!certified && f_norm_sq < best_sq);
    if (!could_win) continue;
    if (!certified && nested.spectrum(m).singular()) {
      consider(m, f_norm_sq);
    } else {
      consider(m, regular_sq);
    }
  }

  TrialOptimum out;
  out.unconverged = unconverged;
  out.error = std::sqrt(best_sq);
  if (out.error < opt.resolution_floor) return out;
  out.m = best_m;
  out.gap = best_m <= nested.factored() ? nested.spectrum(best_m).gap : 1.0;
  return out;
}

}  // namespace

OptimalMTable optimal_m_curve(const TargetFunction& f, const BasisFamily& family, const std::vector<int>& n_values,
                              std::uint64_t seed, const OptimalMOptions& options) {
  if (n_values.empty()) {
    throw InvalidArgument("optimal_m_curve: n_values is empty");
  }
  if (options.trials < 1) {
    throw InvalidArgument("optimal_m_curve: trials must be >= 1");
  }
  for (int n : n_values) {
    if (n < 1) throw InvalidArgument("optimal_m_curve: every n must be >= 1");
  }
  const double f_norm_sq = squared_norm(f, family, options.quad);
  const std::size_t trials = static_cast<std::size_t>(options.trials);
  std::vector<TrialOptimum> slots(n_values.size() * trials);
  parallel_for_index(options.jobs, slots.size(), [&](std::size_t k) {
    const int n = n_values[k / trials];
    const std::uint64_t t = k % trials;
    const SampleSet samples =
        draw_iid(family.measure(), n, substream_seed(trial_seed(seed, t), static_cast<std::uint64_t>(n)));
    slots[k] = optimum_for_samples(f, family, samples, f_norm_sq, options);
  });

  OptimalMTable table;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    OptimalMRow row;
    row.n = n_values[i];
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialOptimum& o = slots[i * trials + t];
      ExperimentRecord r = base_record("optimal-m", family, f, row.n, o.m, seed, static_cast<int>(t));
      r.error = o.error;
      r.gap = o.gap;
      r.bounds["unresolved"] = o.m == 0 ? 1.0 : 0.0;
      r.bounds["quad_unconverged"] = o.unconverged;
      table.records.push_back(std::move(r));
      if (o.m == 0) {
        ++row.unresolved;
      } else {
        row.m_per_trial.push_back(o.m);
      }
    }
    summarize_row(row);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ScalingFit scaling_exponent(const OptimalMTable& table, int bootstrap, std::uint64_t seed) {
  std::vector<const OptimalMRow*> rows;
  for (const auto& row : table.rows) {
    if (row.m_per_trial.empty()) continue;
    rows.push_back(&row);
  }
  std::sort(rows.begin(), rows.end(), [](const OptimalMRow* a, const OptimalMRow* b) { return a->n < b->n; });
  std::vector<int> distinct;
  for (const auto* row : rows) {
    if (row->n < 1) throw InvalidArgument("scaling_exponent: n must be >= 1");
    if (!(row->mean_m >= 1.0)) throw InvalidArgument("scaling_exponent: every m(n) must be >= 1");
    if (distinct.empty() || distinct.back() != row->n) distinct.push_back(row->n);
  }
  if (distinct.size() != rows.size()) {
    throw InvalidArgument("scaling_exponent: duplicate n values in table");
  }
  if (rows.size() < 5) {
    throw InvalidArgument("scaling_exponent: need at least 5 distinct resolved n values, got " +
                          std::to_string(rows.size()));
  }
  rows.erase(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(rows.size() / 2));

  ScalingFit fit;
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto* row : rows) {
    fit.n_used.push_back(row->n);
    lx.push_back(std::log(static_cast<double>(row->n)));
    ly.push_back(std::log(row->mean_m));
  }
  fit.slope = ols_slope(lx, ly);
  fit.ci_lower = fit.slope;
  fit.ci_upper = fit.slope;
  if (bootstrap < 1) return fit;

  Rng rng(seed);
  std::vector<double> slopes;
  slopes.reserve(static_cast<std::size_t>(bootstrap));
  std::vector<double> by(ly.size());
  for (int b = 0; b < bootstrap; ++b) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& ms = rows[i]->m_per_trial;
      double s = 0.0;
      for (std::size_t j = 0; j < ms.size(); ++j) s += ms[static_cast<std::size_t>(rng() % ms.size())];
      by[i] = std::log(s / static_cast<double>(ms.size()));
    }
    slopes.push_back(ols_slope(lx, by));
  }
  std::sort(slopes.begin(), slopes.end());
  auto pct = [&](double p) {
    const double pos = p * static_cast<double>(slopes.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, slopes.size() - 1);
    return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
  };
  fit.ci_lower = pct(0.025);
  fit.ci_upper = pct(0.975);
  return fit;
}

double epsilon_n(int n, double r) {
  if (n < 2) throw InvalidArgument("epsilon_n: n must be >= 2");
  return 4.0 * kappa(r) / std::log(static_cast<double>(n));
}

double noiseless_bound(double e_m, double sup_bound, int n, double r) {
  return (1.0 + epsilon_n(n, r)) * e_m * e_m + 8.0 * sup_bound * sup_bound * std::pow(n, -r);
}

double noisy_bound(double e_m, double sup_bound, int n, double r, double sigma, int m) {
  return (1.0 + 2.0 * epsilon_n(n, r)) * e_m * e_m + 8.0 * sup_bound * sup_bound * std::pow(n, -r) +
         8.0 * sigma * sigma * m / n;
}

const BoundSweepRow* BoundReport::at_budget() const {
  for (const auto& row : rows) {
    if (row.m == budget) return &row;
  }
  return nullptr;
}

namespace {

BoundReport bound_experiment(const char* id, const TargetFunction& f, const BasisFamily& family, int n, double r,
                             double sigma, bool sweep, std::uint64_t seed, const BoundOptions& opt) {
  if (opt.trials < 1) throw InvalidArgument(std::string(id) + ": trials must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidArgument(std::string(id) + ": sigma must be >= 0");
  BoundReport report;
  report.experiment = id;
  report.n = n;
  report.r = r;
  report.sigma = sigma;
  report.eps_n = epsilon_n(n, r);
  report.budget = stability_budget(family, n, r);
  if (report.budget == 0) {
    report.status = CheckStatus::Inapplicable;
    return report;
  }
  const std::vector<int> dims = sweep ? admissible_dims(family, report.budget) : std::vector<int>{report.budget};
  const std::size_t trials = static_cast<std::size_t>(opt.trials);

  // One sample set and noise draw per trial, shared by every m of the sweep.
  std::vector<std::vector<double>> sq(dims.size(), std::vector<double>(trials));
  std::vector<std::vector<double>> gaps(dims.size(), std::vector<double>(trials));
  parallel_for_index(opt.jobs, trials, [&](std::size_t t) {
    const std::uint64_t ts = trial_seed(seed, t);
    const SampleSet samples = draw_iid(family.measure(), n, substream_seed(ts, kPointStream));
    const std::vector<double> clean = evaluate(f.eval, samples.points);
    const std::vector<double> y = add_noise(clean, sigma, substream_seed(ts, kNoiseStream), opt.noise);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const FitResult fit = fit_least_squares(family, dims[i], samples, y).truncated_at(f.sup_bound);
      const double e = l2_error(f.eval, fit, opt.quad);
      sq[i][t] = e * e;
      gaps[i][t] = fit.gap();
    }
  });

  bool all = true;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    BoundSweepRow row;
    row.m = dims[i];
    row.e_m = best_error_e_m(f.eval, family, row.m, opt.projection_tol);
    row.bound = sweep || sigma > 0.0 ? noisy_bound(row.e_m, f.sup_bound, n, r, sigma, row.m)
                                     : noiseless_bound(row.e_m, f.sup_bound, n, r);
    row.mean = mean_of(sq[i]);
    row.ci_half = 1.96 * sample_sd(sq[i], row.mean) / std::sqrt(static_cast<double>(trials));
    row.dominated = row.mean - row.ci_half <= row.bound;
    all = all && row.dominated;
    for (std::size_t t = 0; t < trials; ++t) {
      ExperimentRecord rec = base_record(id, family, f, n, row.m, seed, static_cast<int>(t));
      rec.error = std::sqrt(sq[i][t]);
      rec.gap = gaps[i][t];
      rec.bounds["bound"] = row.bound;
      rec.bounds["e_m"] = row.e_m;
      rec.bounds["eps_n"] = report.eps_n;
      rec.bounds["sigma"] = sigma;
      report.records.push_back(std::move(rec));
    }
    report.rows.push_back(row);
  }
  report.status = all ? CheckStatus::Holds : CheckStatus::Violated;
  return report;
}

}  // namespace

BoundReport noiseless_bound_experiment(const TargetFunction& f, const BasisFamily& family, int n, double r,
                                       std::uint64_t seed, const BoundOptions& options) {
  return bound_experiment("noiseless-bound", f, family, n, r, 0.0, false, seed, options);
}

BoundReport noisy_bound_experiment(const TargetFunction& f, const BasisFamily& family, int n, double r, double sigma,
                                   std::uint64_t seed, const BoundOptions& options) {
  return bound_experiment("noisy-bound", f, family, n, r, sigma, true, seed, options);
}

std::optional<double> deterministic_gap_bound(const BasisFamily& family, int n, int m) {
  if (m < 1 || n < 1 || m > n) return std::nullopt;
  switch (family.kind()) {
    case BasisKind::LegendreUniform:
      return 2.0 * (m - 1.0) * (m - 1.0) / n;
    case BasisKind::ChebyshevArcsine:
      return std::numbers::pi * (m - 1.0) / n;
    case BasisKind::TrigonometricUniform:
      return 0.0;
    case BasisKind::PiecewiseConstant:
      // One point per cell reproduces the norm only when every cell has measure 1/n.
      if (n != family.cells() || m > family.cells()) return std::nullopt;
      for (double mass : family.cell_masses()) {
        if (std::abs(mass * n - 1.0) > 1e-12) return std::nullopt;
      }
      return 0.0;
    case BasisKind::ShrunkUniformLinear:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<DeterministicGapRow> deterministic_stability_table(const BasisFamily& family,
                                                               const std::vector<int>& n_values,
                                                               const std::vector<int>& m_values, int jobs) {
  std::vector<std::pair<int, int>> grid;
  for (int n : n_values) {
    for (int m : m_values) {
      if (family.kind() == BasisKind::TrigonometricUniform && m % 2 == 0) continue;
      if (deterministic_gap_bound(family, n, m)) grid.emplace_back(n, m);
    }
  }
  const double allowance = family.kind() == BasisKind::TrigonometricUniform ? 1e-12
                           : family.kind() == BasisKind::PiecewiseConstant  ? 1e-14
                                                                            : 0.0;
  std::vector<DeterministicGapRow> rows(grid.size());
  parallel_for_index(jobs, grid.size(), [&](std::size_t i) {
    const auto [n, m] = grid[i];
    const SampleSet pts = deterministic_points(family, n);
    DeterministicGapRow row;
    row.n = n;
    row.m = m;
    row.gap = spectral_gap(gram_from_design(design_matrix(family, m, pts.points)));
    row.bound = *deterministic_gap_bound(family, n, m);
    row.allowance = allowance;
    row.pass = row.gap <= row.bound + allowance;
    rows[i] = row;
  });
  return rows;
}

}  // namespace lsqstab
