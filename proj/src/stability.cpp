#include "lsqstab/stability.hpp"

#include "lsqstab/errors.hpp"
#include "lsqstab/jacobi.hpp"
#include "lsqstab/parallel.hpp"
#include "lsqstab/rng.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lsqstab {

Eigen::MatrixXd design_matrix(const BasisFamily& family, int m, std::span<const double> points) {
  family.check_dimension(m);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, m);
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) {
    eval_basis_into(family, m, points[static_cast<std::size_t>(i)], row);
    for (int j = 0; j < m; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  return a;
}

Eigen::MatrixXd gram_from_design(const Eigen::MatrixXd& design) {
  const Eigen::Index m = design.cols();
  const double inv_n = 1.0 / static_cast<double>(design.rows());
  Eigen::MatrixXd g(m, m);
  g.setZero();
  g.selfadjointView<Eigen::Upper>().rankUpdate(design.transpose(), inv_n);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) g(j, i) = g(i, j);
  }
  return g;
}

GramSystem build_gram(const BasisFamily& family, int m, const SampleSet& samples, std::span<const double> y) {
  if (samples.n() < 1) {
    throw InvalidArgument("build_gram: empty sample set");
  }
  if (!y.empty() && static_cast<int>(y.size()) != samples.n()) {
    throw InvalidArgument("build_gram: y has " + std::to_string(y.size()) + " entries, expected " +
                          std::to_string(samples.n()));
  }
  const Eigen::MatrixXd a = design_matrix(family, m, samples.points);
  GramSystem sys;
  sys.m = m;
  sys.n = samples.n();
  sys.gram = gram_from_design(a);
  sys.rhs = Eigen::VectorXd::Zero(m);
  if (!y.empty()) {
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    sys.rhs.noalias() = a.transpose() * yv / static_cast<double>(sys.n);
  }
  return sys;
}

GramSpectrum gram_spectrum(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw InvalidArgument("spectral_gap: matrix must be square and non-empty");
  }
  const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    throw InvalidArgument("spectral_gap: matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
  }
  const SymmetricEigen eig = jacobi_eigen(g);
  GramSpectrum s;
  s.lambda_min = eig.values[0];
  s.lambda_max = eig.values[eig.values.size() - 1];
  s.gap = std::max(s.lambda_max - 1.0, 1.0 - s.lambda_min);
  return s;
}

double spectral_gap(const Eigen::MatrixXd& g) { return gram_spectrum(g).gap; }

double c_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("c_delta: delta must lie in (0,1)");
  }
  if (delta < 0.1) {
    // delta + (1-delta) log(1-delta) = sum_{k>=2} delta^k / (k(k-1)); avoids cancellation.
    double sum = 0.0;
    double power = delta;
    for (int k = 2; k < 200; ++k) {
      power *= delta;
      const double term = power / (k * (k - 1.0));
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  return delta + (1.0 - delta) * std::log1p(-delta);
}

double chernoff_tail_bound(const TailBoundInputs& in) {
  if (in.m < 1 || in.n < 1) {
    throw InvalidArgument("chernoff_tail_bound: m and n must be >= 1");
  }
  if (!(in.k >= in.m)) {
    throw InvalidArgument("chernoff_tail_bound: K(m) must be >= m");
  }
  const double exponent = -c_delta(in.delta) * static_cast<double>(in.n) / in.k;
  return std::min(1.0, 2.0 * in.m * std::exp(exponent));
}

double kappa(double r) {
  if (!(r > 0.0)) {
    throw InvalidArgument("kappa: r must be > 0");
  }
  return c_delta(0.5) / (1.0 + r);
}

double budget_threshold(int n, double r) {
  if (n < 2) {
    throw InvalidArgument("stability budget needs n >= 2");
  }
  return kappa(r) * n / std::log(static_cast<double>(n));
}

int stability_budget(const BasisFamily& family, int n, double r) {
  const double threshold = budget_threshold(n, r);
  const bool odd_only = family.kind() == BasisKind::TrigonometricUniform;
  const long long max_index = family.kind() == BasisKind::ShrunkUniformLinear ? 2 : (1LL << 40);
  auto dim = [&](long long j) { return odd_only ? 2 * j - 1 : j; };
  auto k_of = [&](long long j) -> double {
    const long long m = dim(j);
    if (family.kind() == BasisKind::PiecewiseConstant) return static_cast<double>(m);
    return k_of_m_analytic(family, static_cast<int>(m));
  };

  if (k_of(1) > threshold) return 0;
  long long lo = 1;  // admissible
  long long hi = 2;
  while (hi <= max_index && k_of(hi) <= threshold) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, max_index + 1);  // first index known (or assumed) inadmissible
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (k_of(mid) <= threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<int>(dim(lo));
}

std::pair<double, double> clopper_pearson(int successes, int trials, double confidence) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw InvalidArgument("clopper_pearson: need 0 <= successes <= trials, trials >= 1");
  }
  const double alpha = 1.0 - confidence;
  double lo = 0.0;
  double hi = 1.0;
  if (successes > 0) {
    boost::math::beta_distribution<double> dist(successes, trials - successes + 1);
    lo = boost::math::quantile(dist, alpha / 2.0);
  }
  if (successes < trials) {
    boost::math::beta_distribution<double> dist(successes + 1, trials - successes);
    hi = boost::math::quantile(dist, 1.0 - alpha / 2.0);
  }
  return {lo, hi};
}

std::vector<double> mc_gap_samples(const BasisFamily& family, int m, int n, int trials, std::uint64_t seed,
                                   int jobs) {
  if (trials < 1) {
    throw InvalidArgument("mc_tail_probability: trials must be >= 1");
  }
  family.check_dimension(m);
  std::vector<double> gaps(static_cast<std::size_t>(trials));
  parallel_for_index(jobs, gaps.size(), [&](std::size_t t) {
    const SampleSet s = draw_iid(family.measure(), n, trial_seed(seed, t));
    const Eigen::MatrixXd g = gram_from_design(design_matrix(family, m, s.points));
    gaps[t] = spectral_gap(g);
  });
  return gaps;
}

TailEstimate tail_estimate_from_gaps(std::span<const double> gaps, double delta) {
  TailEstimate est;
  est.trials = static_cast<int>(gaps.size());
  est.exceedances = static_cast<int>(std::count_if(gaps.begin(), gaps.end(), [&](double g) { return g > delta; }));
  est.estimate = static_cast<double>(est.exceedances) / est.trials;
  std::tie(est.ci_lower, est.ci_upper) = clopper_pearson(est.exceedances, est.trials);
  return est;
}

TailEstimate mc_tail_probability(const BasisFamily& family, int m, int n, double delta, int trials,
                                 std::uint64_t seed, int jobs) {
  const std::vector<double> gaps = mc_gap_samples(family, m, n, trials, seed, jobs);
  return tail_estimate_from_gaps(gaps, delta);
}

StabilityCheck stability_constant_check(const GramSystem& g, const CoefficientVector& w, std::span<const double> y) {
  if (static_cast<int>(y.size()) != g.n) {
    throw InvalidArgument("stability_constant_check: y length does not match the Gram system");
  }
  StabilityCheck check;
  check.gap = spectral_gap(g.gram);
  double sq = 0.0;
  for (double v : y) sq += v * v;
  check.rhs = std::sqrt(6.0) * std::sqrt(sq / static_cast<double>(g.n));
  check.lhs = w.norm();
  if (check.gap > 0.5) {
    check.status = CheckStatus::Inapplicable;
    return check;
  }
  check.status = check.lhs <= check.rhs ? CheckStatus::Holds : CheckStatus::Violated;
  return check;
}

}  // namespace lsqstab
