#include "lsqstab/estimator.hpp"

#include "lsqstab/errors.hpp"
#include "lsqstab/rng.hpp"

#include <cmath>
#include <sstream>

namespace lsqstab {

double truncate(double value, double level) {
  if (!(level > 0.0)) {
    throw InvalidArgument("truncate: level L must be > 0");
  }
  return std::copysign(std::min(level, std::abs(value)), value);
}

double FitResult::operator()(double x) const {
  const double raw = coeffs(x);
  return truncation_level ? truncate(raw, *truncation_level) : raw;
}

FitResult FitResult::truncated_at(double level) const {
  if (!(level > 0.0)) {
    throw InvalidArgument("truncation level L must be > 0");
  }
  FitResult copy = *this;
  copy.truncation_level = level;
  return copy;
}

FitResult fit_gram_system(const BasisFamily& family, const GramSystem& system) {
  FitResult fit{CoefficientVector{family, std::vector<double>(static_cast<std::size_t>(system.m), 0.0)}, false,
                std::nullopt, gram_spectrum(system.gram)};
  if (fit.spectrum.singular()) {
    fit.singular = true;
    return fit;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(system.gram);
  if (llt.info() != Eigen::Success) {
    fit.singular = true;
    return fit;
  }
  const Eigen::VectorXd u = llt.solve(system.rhs);
  for (int k = 0; k < system.m; ++k) fit.coeffs.coeffs[static_cast<std::size_t>(k)] = u[k];
  return fit;
}

FitResult fit_least_squares(const BasisFamily& family, int m, const SampleSet& samples, std::span<const double> y) {
  if (static_cast<int>(y.size()) != samples.n()) {
    throw InvalidArgument("fit_least_squares: y must have one value per sample point");
  }
  return fit_gram_system(family, build_gram(family, m, samples, y));
}

QuadratureResult l2_error_squared(const ScalarFunction& f, const FitResult& fit, const QuadratureSpec& quad,
                                  double abort_above) {
  const Measure& mu = fit.coeffs.family.measure();
  return integrate(
      mu,
      [&](double x) {
        const double d = f(x) - fit(x);
        return d * d;
      },
      quad, abort_above);
}

double l2_error(const ScalarFunction& f, const FitResult& fit, const QuadratureSpec& quad) {
  const QuadratureResult r = l2_error_squared(f, fit, quad);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "l2_error: adaptive Simpson did not reach tol " << quad.tol << " within depth " << quad.max_depth;
    throw QuadratureError(msg.str(), std::sqrt(std::max(0.0, r.value)), r.unresolved);
  }
  return std::sqrt(std::max(0.0, r.value));
}

std::vector<double> add_noise(std::span<const double> clean, double sigma, std::uint64_t seed, NoiseModel model) {
  if (!(sigma >= 0.0)) {
    throw InvalidArgument("add_noise: sigma must be >= 0");
  }
  std::vector<double> y(clean.begin(), clean.end());
  if (sigma == 0.0) {
    return y;
  }
  Rng rng(seed);
  for (double& v : y) {
    switch (model) {
      case NoiseModel::Gaussian:
        v += sigma * rng.normal();
        break;
      case NoiseModel::Uniform:
        v += sigma * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
        break;
      case NoiseModel::Rademacher:
        v += (rng() >> 63) != 0 ? sigma : -sigma;
        break;
    }
  }
  return y;
}

NestedLeastSquares::NestedLeastSquares(const BasisFamily& family, int max_m, const SampleSet& samples,
                                       std::span<const double> y)
    : family_(family), max_m_(max_m) {
  family.check_dimension(max_m);
  if (static_cast<int>(y.size()) != samples.n()) {
    throw InvalidArgument("NestedLeastSquares: y must have one value per sample point");
  }
  const Eigen::MatrixXd a = design_matrix(family, max_m, samples.points);
  gram_ = gram_from_design(a);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd rhs = a.transpose() * yv / static_cast<double>(samples.n());

  // Left-looking Cholesky that stops at the first non-positive pivot; every
  // leading block before that point is factored exactly as a standalone LLT would be.
  const Eigen::Index mm = max_m;
  chol_ = Eigen::MatrixXd::Zero(mm, mm);
  for (Eigen::Index j = 0; j < mm; ++j) {
    const double d = gram_(j, j) - chol_.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) break;
    const double ljj = std::sqrt(d);
    chol_(j, j) = ljj;
    const Eigen::Index below = mm - j - 1;
    if (below > 0) {
      chol_.col(j).tail(below) =
          (gram_.col(j).tail(below) - chol_.bottomLeftCorner(below, j) * chol_.row(j).head(j).transpose()) / ljj;
    }
    factored_ = static_cast<int>(j + 1);
  }

  const Eigen::Index f = factored_;
  chol_inv_ = chol_.topLeftCorner(f, f).triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(f, f));
  z_ = chol_inv_.triangularView<Eigen::Lower>() * rhs.head(f);

  inv_frob_sq_.assign(static_cast<std::size_t>(f), 0.0);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < f; ++k) {
    acc += chol_inv_.row(k).head(k + 1).squaredNorm();
    inv_frob_sq_[static_cast<std::size_t>(k)] = acc;
  }
  gram_frob_sq_.assign(static_cast<std::size_t>(mm), 0.0);
  acc = 0.0;
  for (Eigen::Index k = 0; k < mm; ++k) {
    acc += 2.0 * gram_.col(k).head(k).squaredNorm() + gram_(k, k) * gram_(k, k);
    gram_frob_sq_[static_cast<std::size_t>(k)] = acc;
  }
}

bool NestedLeastSquares::certified_regular(int m) const {
  if (m < 1 || m > factored_) return false;
  const auto k = static_cast<std::size_t>(m - 1);
  const double lambda_min_lower = 1.0 / inv_frob_sq_[k];
  const double lambda_max_upper = std::sqrt(gram_frob_sq_[k]);
  return lambda_min_lower >= kSingularityThreshold * lambda_max_upper;
}

GramSpectrum NestedLeastSquares::spectrum(int m) const {
  if (m < 1 || m > max_m_) {
    throw InvalidArgument("NestedLeastSquares: m out of range");
  }
  return gram_spectrum(gram_.topLeftCorner(m, m));
}

FitResult NestedLeastSquares::fit(int m, bool exact_spectrum) const {
  family_.check_dimension(m);
  if (m > max_m_) {
    throw InvalidArgument("NestedLeastSquares: m exceeds the prepared maximum");
  }
  FitResult fit{CoefficientVector{family_, std::vector<double>(static_cast<std::size_t>(m), 0.0)}, false,
                std::nullopt, GramSpectrum{}};
  bool singular = false;
  if (exact_spectrum || !certified_regular(m)) {
    fit.spectrum = spectrum(m);
    singular = fit.spectrum.singular();
  }
  if (singular || m > factored_) {
    fit.singular = true;
    return fit;
  }
  fit.coeffs.coeffs = coefficients(m);
  return fit;
}

std::vector<double> NestedLeastSquares::coefficients(int m) const {
  if (m < 1 || m > factored_) {
    throw InvalidArgument("NestedLeastSquares: block is not factored");
  }
  const Eigen::VectorXd u =
      chol_inv_.topLeftCorner(m, m).triangularView<Eigen::Lower>().transpose() * z_.head(m);
  return std::vector<double>(u.data(), u.data() + m);
}

}  // namespace lsqstab
