#pragma once

#include "lsqstab/bases.hpp"
#include "lsqstab/measure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lsqstab {

enum class SampleOrigin { Random, Deterministic };

struct SampleSet {
  std::vector<double> points;
  SampleOrigin origin = SampleOrigin::Random;
  /// Seed of the uniform stream (Random origin only).
  std::uint64_t seed = 0;
  /// Measure for Random origin, or the family's measure for deterministic schemes.
  std::optional<Measure> measure;
  /// Name of the deterministic scheme ("equispaced", "equal-measure-midpoints", "cell-midpoints").
  std::string scheme;

  int n() const noexcept { return static_cast<int>(points.size()); }
};

/// n i.i.d. draws: inverse CDF applied to a seeded uniform stream, one uniform per point.
SampleSet draw_iid(const Measure& measure, int n, std::uint64_t seed);

/// The deterministic samplings with provable stability:
///  - trig: x_i = -pi + 2 pi i / n, i = 1..n
///  - Legendre/uniform: midpoints of n equal-length cells
///  - Chebyshev: midpoints in theta of n cells of equal arcsine measure, x_i = cos(pi (i - 1/2) / n), ascending
///  - piecewise constant: one midpoint per cell (n must equal the cell count)
SampleSet deterministic_points(const BasisFamily& family, int n);

}  // namespace lsqstab
