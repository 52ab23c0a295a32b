#include "lsqstab/measure.hpp"

#include "lsqstab/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace lsqstab {

Measure Measure::uniform(double a, double b) {
  if (!(a < b)) {
    throw InvalidArgument("uniform measure needs a < b");
  }
  return Measure(MeasureKind::Uniform, a, b);
}

Measure Measure::chebyshev() { return Measure(MeasureKind::ChebyshevArcsine, -1.0, 1.0); }

Measure Measure::shrunk(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("shrunk measure needs epsilon in (0,1]");
  }
  return Measure(MeasureKind::UniformShrunk, -epsilon, epsilon);
}

double Measure::density(double x) const {
  if (x < a_ || x > b_) {
    return 0.0;
  }
  switch (kind_) {
    case MeasureKind::Uniform:
    case MeasureKind::UniformShrunk:
      return 1.0 / (b_ - a_);
    case MeasureKind::ChebyshevArcsine:
      return 1.0 / (std::numbers::pi * std::sqrt((1.0 - x) * (1.0 + x)));
  }
  return 0.0;
}

double Measure::cdf(double x) const {
  if (x <= a_) return 0.0;
  if (x >= b_) return 1.0;
  switch (kind_) {
    case MeasureKind::Uniform:
    case MeasureKind::UniformShrunk:
      return (x - a_) / (b_ - a_);
    case MeasureKind::ChebyshevArcsine:
      return 1.0 - std::acos(x) / std::numbers::pi;
  }
  return 0.0;
}

double Measure::inverse_cdf(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("inverse_cdf: u must lie in [0,1]");
  }
  switch (kind_) {
    case MeasureKind::Uniform:
      return a_ + (b_ - a_) * u;
    case MeasureKind::ChebyshevArcsine:
      return -std::cos(std::numbers::pi * u);
    case MeasureKind::UniformShrunk:
      return b_ * (2.0 * u - 1.0);
  }
  return 0.0;
}

std::string Measure::name() const {
  switch (kind_) {
    case MeasureKind::Uniform:
      if (a_ == -1.0 && b_ == 1.0) return "uniform";
      return "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    case MeasureKind::ChebyshevArcsine:
      return "chebyshev";
    case MeasureKind::UniformShrunk: {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, b_);
      return "shrunk:" + std::string(buf, end);
    }
  }
  return "?";
}

Measure parse_measure(std::string_view text) {
  if (text == "uniform") return Measure::uniform();
  if (text == "chebyshev" || text == "arcsine") return Measure::chebyshev();
  if (text.starts_with("shrunk:")) {
    const std::string rest(text.substr(7));
    double eps = 0.0;
    try {
      eps = std::stod(rest);
    } catch (const std::exception&) {
      throw InvalidArgument("measure: cannot parse epsilon in '" + std::string(text) + "'");
    }
    return Measure::shrunk(eps);
  }
  throw InvalidArgument("unknown measure '" + std::string(text) + "' (expected uniform, chebyshev, shrunk:<eps>)");
}

}  // namespace lsqstab
