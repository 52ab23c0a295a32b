#pragma once

#include <string>
#include <string_view>

namespace lsqstab {

enum class MeasureKind { Uniform, ChebyshevArcsine, UniformShrunk };

/// Probability measure on an interval of the real line.
///
///  - Uniform(a,b):      dx/(b-a) on [a,b]
///  - ChebyshevArcsine:  dx/(pi sqrt(1-x^2)) on [-1,1]
///  - UniformShrunk(e):  dx/(2e) on [-e,e]
class Measure {
 public:
  static Measure uniform(double a = -1.0, double b = 1.0);
  static Measure chebyshev();
  static Measure shrunk(double epsilon);

  MeasureKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  /// Half-width of the support for UniformShrunk; 0 otherwise.
  double epsilon() const noexcept { return kind_ == MeasureKind::UniformShrunk ? b_ : 0.0; }

  double density(double x) const;
  double cdf(double x) const;
  /// Throws DomainError for u outside [0,1].
  double inverse_cdf(double u) const;

  /// Short identifier used in records and the CLI ("uniform", "chebyshev", "shrunk").
  std::string name() const;

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  Measure(MeasureKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  MeasureKind kind_;
  double a_;
  double b_;
};

/// Parses "uniform", "chebyshev"/"arcsine", or "shrunk:<eps>".
Measure parse_measure(std::string_view text);

}  // namespace lsqstab
