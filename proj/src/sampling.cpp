#include "lsqstab/sampling.hpp"

#include "lsqstab/errors.hpp"
#include "lsqstab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lsqstab {

SampleSet draw_iid(const Measure& measure, int n, std::uint64_t seed) {
  if (n < 1) {
    throw InvalidArgument("draw_iid: n must be >= 1");
  }
  SampleSet s;
  s.origin = SampleOrigin::Random;
  s.seed = seed;
  s.measure = measure;
  s.points.resize(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (double& x : s.points) {
    x = measure.inverse_cdf(rng.uniform());
  }
  return s;
}

SampleSet deterministic_points(const BasisFamily& family, int n) {
  if (n < 1) {
    throw InvalidArgument("deterministic_points: n must be >= 1");
  }
  SampleSet s;
  s.origin = SampleOrigin::Deterministic;
  s.measure = family.measure();
  s.points.resize(static_cast<std::size_t>(n));
  const double dn = n;
  switch (family.kind()) {
    case BasisKind::TrigonometricUniform:
      s.scheme = "equispaced";
      for (int i = 1; i <= n; ++i) {
        // Rounding can push the last point just past pi.
        s.points[static_cast<std::size_t>(i - 1)] =
            std::min(std::numbers::pi, -std::numbers::pi + 2.0 * std::numbers::pi * i / dn);
      }
      break;
    case BasisKind::LegendreUniform:
      s.scheme = "equal-measure-midpoints";
      for (int i = 1; i <= n; ++i) {
        s.points[static_cast<std::size_t>(i - 1)] = -1.0 + (2.0 * i - 1.0) / dn;
      }
      break;
    case BasisKind::ChebyshevArcsine:
      s.scheme = "equal-measure-midpoints";
      // Cell i in theta is [pi (i-1)/n, pi i/n]; listing i from n down to 1 sorts x ascending.
      for (int i = n; i >= 1; --i) {
        s.points[static_cast<std::size_t>(n - i)] = std::cos(std::numbers::pi * (i - 0.5) / dn);
      }
      break;
    case BasisKind::PiecewiseConstant: {
      if (n != family.cells()) {
        throw InvalidArgument("deterministic_points: piecewise constant sampling needs n = number of cells (" +
                              std::to_string(family.cells()) + "), got " + std::to_string(n));
      }
      s.scheme = "cell-midpoints";
      const auto& b = family.boundaries();
      for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        s.points[k] = 0.5 * (b[k] + b[k + 1]);
      }
      break;
    }
    case BasisKind::ShrunkUniformLinear:
      s.scheme = "equal-measure-midpoints";
      for (int i = 1; i <= n; ++i) {
        s.points[static_cast<std::size_t>(i - 1)] = family.epsilon() * (-1.0 + (2.0 * i - 1.0) / dn);
      }
      break;
  }
  return s;
}

}  // namespace lsqstab
