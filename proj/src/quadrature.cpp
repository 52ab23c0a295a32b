#include "lsqstab/quadrature.hpp"

#include "lsqstab/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lsqstab {

QuadratureResult adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                                  const QuadratureSpec& spec, double abort_above) {
  if (!(spec.tol > 0.0) || spec.max_depth < 1) {
    throw InvalidArgument("quadrature: tol must be > 0 and max_depth >= 1");
  }
  double total = 0.0;
  QuadratureResult res = detail::simpson_impl<double>(g, a, b, spec, total, abort_above);
  res.value = total;
  return res;
}

QuadratureResult integrate(const Measure& measure, const std::function<double(double)>& g,
                           const QuadratureSpec& spec, double abort_above) {
  switch (measure.kind()) {
    case MeasureKind::Uniform:
    case MeasureKind::UniformShrunk: {
      const double a = measure.lower();
      const double b = measure.upper();
      const double w = 1.0 / (b - a);
      return adaptive_simpson([&](double x) { return g(x) * w; }, a, b, spec, abort_above);
    }
    case MeasureKind::ChebyshevArcsine:
      return adaptive_simpson([&](double t) { return g(std::cos(t)) / std::numbers::pi; }, 0.0,
                              std::numbers::pi, spec, abort_above);
  }
  return {};
}

double integrate_or_throw(const Measure& measure, const std::function<double(double)>& g,
                          const QuadratureSpec& spec) {
  const QuadratureResult res = integrate(measure, g, spec);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not reach tol " << spec.tol << " within depth " << spec.max_depth
        << " (estimate " << res.value << ", unresolved error " << res.unresolved << ")";
    throw QuadratureError(msg.str(), res.value, res.error_bound);
  }
  return res.value;
}

}  // namespace lsqstab
