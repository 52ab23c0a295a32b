#pragma once

#include "lsqstab/bases.hpp"
#include "lsqstab/quadrature.hpp"
#include "lsqstab/sampling.hpp"
#include "lsqstab/stability.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace lsqstab {

/// Least-squares fit w = sum_j u_j L_j, optionally read through the truncation T_L.
struct FitResult {
  CoefficientVector coeffs;
  /// G was (numerically) singular and w was set to zero.
  bool singular = false;
  std::optional<double> truncation_level;
  GramSpectrum spectrum;

  double gap() const noexcept { return spectrum.gap; }
  /// w(x), or T_L(w(x)) when a truncation level is set.
  double operator()(double x) const;
  FitResult truncated_at(double level) const;
};

/// Solves G u = f for the first m basis functions. Singular G (see kSingularityThreshold,
/// or a failed Cholesky factorisation) yields u = 0 with singular = true.
FitResult fit_least_squares(const BasisFamily& family, int m, const SampleSet& samples, std::span<const double> y);

/// Solves an already assembled Gram system.
FitResult fit_gram_system(const BasisFamily& family, const GramSystem& system);

/// T_L(t) = sign(t) min(L, |t|): clamps to [-L, L]. Requires L > 0.
double truncate(double value, double level);

/// ||f - fit|| in L2(rho) by adaptive Simpson on |f - fit|^2; throws QuadratureError on non-convergence.
double l2_error(const ScalarFunction& f, const FitResult& fit, const QuadratureSpec& quad = {});

/// Squared error integral with the raw quadrature diagnostics; stops early once the
/// partial integral exceeds abort_above. Never throws.
QuadratureResult l2_error_squared(const ScalarFunction& f, const FitResult& fit, const QuadratureSpec& quad,
                                  double abort_above = std::numeric_limits<double>::infinity());

/// ||v||_n = ((1/n) sum_i v(x_i)^2)^{1/2}.
template <class Evaluable>
double empirical_norm(const Evaluable& v, const SampleSet& samples) {
  double s = 0.0;
  for (double x : samples.points) {
    const double vx = v(x);
    s += vx * vx;
  }
  return std::sqrt(s / static_cast<double>(samples.n()));
}

/// Noise laws with variance exactly sigma^2 (all satisfy the maximal-variance assumption).
enum class NoiseModel { Gaussian, Uniform, Rademacher };

/// y_i = clean_i + eta_i, eta_i i.i.d. centred with variance sigma^2, seeded.
std::vector<double> add_noise(std::span<const double> clean, double sigma, std::uint64_t seed,
                              NoiseModel model = NoiseModel::Gaussian);

/// All nested least-squares fits u(m), m = 1..M, for one sample set, from a single
/// Cholesky factorisation G = L L^T of the largest Gram matrix: the factor of the
/// leading m x m block of G is the leading block of L.
///
/// The singularity test of fit_least_squares needs lambda_min/lambda_max of every
/// leading block. A cheap sufficient certificate is available from
///   lambda_min(G_m) >= 1 / ||L_m^{-1}||_F^2  and  lambda_max(G_m) <= ||G_m||_F;
/// blocks that fail the certificate are checked exactly with the Jacobi solver.
class NestedLeastSquares {
 public:
  NestedLeastSquares(const BasisFamily& family, int max_m, const SampleSet& samples, std::span<const double> y);

  int max_m() const noexcept { return max_m_; }
  /// Number of leading blocks for which the Cholesky factorisation succeeded.
  int factored() const noexcept { return factored_; }
  /// True when the certificate proves lambda_min(G_m) >= threshold * lambda_max(G_m).
  bool certified_regular(int m) const;
  /// Exact singularity test via the Jacobi spectrum of G_m.
  GramSpectrum spectrum(int m) const;
  /// Same result as fit_least_squares(family, m, samples, y), up to rounding.
  /// If exact_spectrum is false the spectrum is only computed when the certificate fails,
  /// and the returned spectrum fields are left zero for certified blocks.
  FitResult fit(int m, bool exact_spectrum = true) const;
  /// Solution of the leading m x m system without any singularity test; requires m <= factored().
  std::vector<double> coefficients(int m) const;

 private:
  BasisFamily family_;
  int max_m_;
  int factored_ = 0;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd chol_;      // lower factor, valid in the leading factored_ block
  Eigen::MatrixXd chol_inv_;  // inverse of the lower factor (same block)
  Eigen::VectorXd z_;         // L^{-1} rhs
  std::vector<double> inv_frob_sq_;   // ||L_m^{-1}||_F^2, index m-1
  std::vector<double> gram_frob_sq_;  // ||G_m||_F^2, index m-1
};

}  // namespace lsqstab
