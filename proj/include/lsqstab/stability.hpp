/**
 * @file stability.hpp
 * @brief Empirical Gram systems, their deviation from the identity, and matrix
 *        Chernoff tail bounds for that deviation.
 *
 * For an L2(rho)-orthonormal basis L_1..L_m and samples x_1..x_n,
 *
 *     G_jk = (1/n) sum_i L_j(x_i) L_k(x_i),      E[G] = I,
 *
 * and |||G - I||| <= delta is equivalent to | ||v||_n^2 - ||v||^2 | <= delta ||v||^2 on V_m.
 * With c_delta = delta + (1-delta) log(1-delta),
 *
 *     Pr{ |||G - I||| > delta } <= 2 m exp(-c_delta n / K(m)),
 *
 * and K(m) <= kappa n / log n with kappa = c_{1/2} / (1 + r) keeps the
 * probability of |||G - I||| > 1/2 below 2 n^{-r}.
 */
#pragma once

#include "lsqstab/bases.hpp"
#include "lsqstab/sampling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace lsqstab {

/// lambda_min(G) < kSingularityThreshold * lambda_max(G) is treated as a singular Gram matrix.
inline constexpr double kSingularityThreshold = 1e-12;

/// A_ij = L_j(x_i), an n x m matrix. The matrix M of the normal equations is A^T / n.
Eigen::MatrixXd design_matrix(const BasisFamily& family, int m, std::span<const double> points);

struct GramSystem {
  Eigen::MatrixXd gram;  ///< G, exactly symmetric
  Eigen::VectorXd rhs;   ///< f_k = (1/n) sum_i y_i L_k(x_i)
  int m = 0;
  int n = 0;
};

/// Builds G and the right-hand side. y may be empty, in which case rhs is zero.
GramSystem build_gram(const BasisFamily& family, int m, const SampleSet& samples, std::span<const double> y = {});

/// G = A^T A / n with the upper triangle computed once and mirrored.
Eigen::MatrixXd gram_from_design(const Eigen::MatrixXd& design);

struct GramSpectrum {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double gap = 0.0;  ///< max(lambda_max - 1, 1 - lambda_min) = |||G - I|||
  bool singular() const noexcept {
    return !(lambda_max > 0.0) || lambda_min < kSingularityThreshold * lambda_max;
  }
};

/// Extreme eigenvalues of a symmetric matrix via the cyclic Jacobi solver.
/// Throws InvalidArgument if the matrix is asymmetric beyond 1e-12.
GramSpectrum gram_spectrum(const Eigen::MatrixXd& g);

/// |||G - I|||.
double spectral_gap(const Eigen::MatrixXd& g);

/// c_delta = delta + (1 - delta) log(1 - delta), for delta in (0,1).
double c_delta(double delta);

struct TailBoundInputs {
  int m = 1;
  int n = 1;
  double k = 1.0;  ///< K(m)
  double delta = 0.5;
  double r = 1.0;
};

/// min(1, 2 m exp(-c_delta n / K)).
double chernoff_tail_bound(const TailBoundInputs& in);

/// kappa = c_{1/2} / (1 + r) = (1 - log 2) / (2 + 2r).
double kappa(double r);

/// kappa n / log n.
double budget_threshold(int n, double r);

/// Largest m >= 1 with K(m) <= kappa n / log n (0 if none). Odd m only for the trigonometric family.
/// For piecewise constants the partition is taken to be of equal measure, so K(m) = m.
int stability_budget(const BasisFamily& family, int n, double r);

struct TailEstimate {
  double estimate = 0.0;
  double ci_lower = 0.0;  ///< 95% Clopper-Pearson
  double ci_upper = 1.0;
  int exceedances = 0;
  int trials = 0;
};

/// 95% Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(int successes, int trials, double confidence = 0.95);

/// |||G - I||| for `trials` independent draws, trial t using seed trial_seed(seed, t).
std::vector<double> mc_gap_samples(const BasisFamily& family, int m, int n, int trials, std::uint64_t seed,
                                   int jobs = 1);

/// Fraction of gaps strictly greater than delta, with its Clopper-Pearson interval.
TailEstimate tail_estimate_from_gaps(std::span<const double> gaps, double delta);

/// Monte Carlo estimate of Pr{ |||G - I||| > delta }.
TailEstimate mc_tail_probability(const BasisFamily& family, int m, int n, double delta, int trials,
                                 std::uint64_t seed, int jobs = 1);

enum class CheckStatus { Holds, Violated, Inapplicable };

struct StabilityCheck {
  CheckStatus status = CheckStatus::Inapplicable;
  double lhs = 0.0;  ///< ||w|| = |u|
  double rhs = 0.0;  ///< sqrt(6) ||y||_n
  double gap = 0.0;
};

/// Checks ||w|| <= sqrt(6) ||y||_n. Inapplicable when |||G - I||| > 1/2.
StabilityCheck stability_constant_check(const GramSystem& g, const CoefficientVector& w, std::span<const double> y);

}  // namespace lsqstab
