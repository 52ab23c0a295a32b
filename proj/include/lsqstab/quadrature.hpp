#pragma once

#include "lsqstab/measure.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <type_traits>
#include <vector>

namespace lsqstab {

/// Adaptive Simpson parameters. tol is an absolute tolerance on the integral.
struct QuadratureSpec {
  double tol = 1e-10;
  int max_depth = 50;
  /// Panels are always split down to this depth before the error test is trusted,
  /// so that oscillatory integrands cannot slip between the first five nodes.
  int min_depth = 5;
  /// Once this many evaluations are spent, every pending panel is accepted after one more
  /// split and its error estimate is counted as unresolved. Integrands polluted by rounding
  /// noise never meet the halving local tolerance and would otherwise grow the tree without bound.
  std::size_t max_evaluations = 2'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  /// Sum of the per-panel Richardson error estimates.
  double error_bound = 0.0;
  /// Estimated error carried by panels that hit max_depth without meeting their local tolerance.
  double unresolved = 0.0;
  bool converged = true;
  /// The running sum exceeded the abort threshold; value is a partial (lower) estimate.
  bool aborted = false;
  std::size_t evaluations = 0;
};

namespace detail {

inline double max_abs(double v) { return std::abs(v); }

template <class V>
double max_abs(const V& v) {
  return v.cwiseAbs().maxCoeff();
}

/// Adaptive Simpson with an explicit stack, visiting panels left to right.
/// Works for scalar and Eigen vector integrands. When abort_above is finite the
/// integrand must be nonnegative and integration stops as soon as the accepted
/// partial sum (minus its error bound) exceeds the threshold.
template <class V, class F>
QuadratureResult simpson_impl(F&& g, double a, double b, const QuadratureSpec& spec, V& total,
                              double abort_above) {
  struct Panel {
    double a, b;
    V fa, fm, fb, whole;
    double tol;
    int depth;
  };

  QuadratureResult res;
  const double m0 = 0.5 * (a + b);
  V fa = g(a);
  V fm = g(m0);
  V fb = g(b);
  res.evaluations = 3;
  V whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  total = 0.0 * fa;

  std::vector<Panel> stack;
  stack.push_back(Panel{a, b, fa, fm, fb, whole, spec.tol, 0});
  while (!stack.empty()) {
    Panel p = std::move(stack.back());
    stack.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + mid);
    const double rm = 0.5 * (mid + p.b);
    V flm = g(lm);
    V frm = g(rm);
    res.evaluations += 2;
    V left = (mid - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    V right = (p.b - mid) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    V delta = left + right - p.whole;
    const double err = max_abs(delta) / 15.0;
    const bool within = err <= p.tol && p.depth >= spec.min_depth;
    if (within || p.depth >= spec.max_depth || res.evaluations >= spec.max_evaluations) {
      total = total + left + right + delta / 15.0;
      res.error_bound += err;
      if (!within) {
        res.unresolved += err;
      }
      if (abort_above < std::numeric_limits<double>::infinity()) {
        if constexpr (std::is_same_v<V, double>) {
          if (total - res.error_bound > abort_above) {
            res.aborted = true;
            break;
          }
        }
      }
      continue;
    }
    stack.push_back(Panel{mid, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
    stack.push_back(Panel{p.a, mid, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
  }
  res.converged = res.unresolved <= spec.tol;
  return res;
}

}  // namespace detail

/// Integral of g over [a,b] by adaptive Simpson. Never throws; check converged.
QuadratureResult adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                                  const QuadratureSpec& spec = {},
                                  double abort_above = std::numeric_limits<double>::infinity());

/// Integral of g with respect to the measure. The arcsine weight is handled through
/// x = cos(theta), so the integrand becomes g(cos theta)/pi on [0,pi].
QuadratureResult integrate(const Measure& measure, const std::function<double(double)>& g,
                           const QuadratureSpec& spec = {},
                           double abort_above = std::numeric_limits<double>::infinity());

/// As integrate(), but throws QuadratureError when the tolerance is not met.
double integrate_or_throw(const Measure& measure, const std::function<double(double)>& g,
                          const QuadratureSpec& spec = {});

}  // namespace lsqstab
