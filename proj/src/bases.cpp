#include "lsqstab/bases.hpp"

#include "lsqstab/errors.hpp"
#include "lsqstab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace lsqstab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = std::numbers::sqrt3;

void require_in_domain(const BasisFamily& family, double x) {
  if (!family.contains(x)) {
    throw DomainError("basis evaluation: x = " + std::to_string(x) + " outside [" +
                      std::to_string(family.domain_lower()) + ", " + std::to_string(family.domain_upper()) + "]");
  }
}

/// Integral of g over [lo,hi] with respect to the measure (lo,hi inside the support).
QuadratureResult integrate_interval(const Measure& measure, const std::function<double(double)>& g, double lo,
                                    double hi, const QuadratureSpec& spec) {
  if (measure.kind() == MeasureKind::ChebyshevArcsine) {
    const double t_lo = std::acos(std::clamp(hi, -1.0, 1.0));
    const double t_hi = std::acos(std::clamp(lo, -1.0, 1.0));
    return adaptive_simpson([&](double t) { return g(std::cos(t)) / std::numbers::pi; }, t_lo, t_hi, spec);
  }
  const double w = 1.0 / (measure.upper() - measure.lower());
  return adaptive_simpson([&](double x) { return g(x) * w; }, lo, hi, spec);
}

}  // namespace

BasisFamily BasisFamily::legendre() {
  return BasisFamily(BasisKind::LegendreUniform, Measure::uniform(-1.0, 1.0), -1.0, 1.0);
}

BasisFamily BasisFamily::chebyshev() {
  return BasisFamily(BasisKind::ChebyshevArcsine, Measure::chebyshev(), -1.0, 1.0);
}

BasisFamily BasisFamily::trigonometric() {
  return BasisFamily(BasisKind::TrigonometricUniform, Measure::uniform(-std::numbers::pi, std::numbers::pi),
                     -std::numbers::pi, std::numbers::pi);
}

BasisFamily BasisFamily::piecewise_constant(std::vector<double> boundaries, Measure measure) {
  if (boundaries.size() < 2) {
    throw InvalidArgument("piecewise constant family needs at least two boundaries");
  }
  if (!std::is_sorted(boundaries.begin(), boundaries.end()) ||
      std::adjacent_find(boundaries.begin(), boundaries.end()) != boundaries.end()) {
    throw InvalidArgument("piecewise constant boundaries must be strictly increasing");
  }
  if (boundaries.front() != measure.lower() || boundaries.back() != measure.upper()) {
    throw InvalidArgument("piecewise constant boundaries must span the support of the measure");
  }
  BasisFamily family(BasisKind::PiecewiseConstant, measure, boundaries.front(), boundaries.back());
  family.masses_.reserve(boundaries.size() - 1);
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    const double mass = measure.cdf(boundaries[k]) - measure.cdf(boundaries[k - 1]);
    if (!(mass > 0.0)) {
      throw InvalidArgument("piecewise constant cell with zero measure");
    }
    family.masses_.push_back(mass);
  }
  family.boundaries_ = std::move(boundaries);
  return family;
}

BasisFamily BasisFamily::piecewise_constant_equal(int cells, Measure measure) {
  if (cells < 1) {
    throw InvalidArgument("piecewise constant family needs at least one cell");
  }
  std::vector<double> b(static_cast<std::size_t>(cells) + 1);
  b.front() = measure.lower();
  b.back() = measure.upper();
  for (int k = 1; k < cells; ++k) {
    b[static_cast<std::size_t>(k)] = measure.inverse_cdf(static_cast<double>(k) / cells);
  }
  BasisFamily family = piecewise_constant(std::move(b), measure);
  // The measure of each cell is 1/cells by construction; keep it exact rather than
  // the cdf round trip so that K(m) = m holds without rounding.
  std::fill(family.masses_.begin(), family.masses_.end(), 1.0 / cells);
  return family;
}

BasisFamily BasisFamily::shrunk_linear(double epsilon) {
  return BasisFamily(BasisKind::ShrunkUniformLinear, Measure::shrunk(epsilon), -1.0, 1.0);
}

int BasisFamily::cell_of(double x) const {
  if (kind_ != BasisKind::PiecewiseConstant) {
    throw InvalidArgument("cell_of: not a piecewise constant family");
  }
  require_in_domain(*this, x);
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
  const int idx = static_cast<int>(it - boundaries_.begin()) - 1;
  return std::min(idx, cells() - 1);
}

int BasisFamily::max_dimension() const noexcept {
  switch (kind_) {
    case BasisKind::PiecewiseConstant:
      return cells();
    case BasisKind::ShrunkUniformLinear:
      return 2;
    default:
      return std::numeric_limits<int>::max();
  }
}

void BasisFamily::check_dimension(int m) const {
  if (m < 1) {
    throw InvalidArgument("dimension m must be >= 1");
  }
  if (kind_ == BasisKind::TrigonometricUniform && m % 2 == 0) {
    throw InvalidArgument("trigonometric family needs odd m = 2p+1, got " + std::to_string(m));
  }
  if (kind_ == BasisKind::ShrunkUniformLinear && m > 2) {
    throw Unsupported("shrunk-measure linear family is defined only for m <= 2");
  }
  if (kind_ == BasisKind::PiecewiseConstant && m > cells()) {
    throw InvalidArgument("piecewise constant family has only " + std::to_string(cells()) + " cells");
  }
}

std::string BasisFamily::name() const {
  switch (kind_) {
    case BasisKind::LegendreUniform:
      return "legendre";
    case BasisKind::ChebyshevArcsine:
      return "chebyshev";
    case BasisKind::TrigonometricUniform:
      return "trig";
    case BasisKind::PiecewiseConstant:
      return "pc:" + std::to_string(cells());
    case BasisKind::ShrunkUniformLinear:
      return measure_.name();
  }
  return "?";
}

BasisFamily parse_family(std::string_view text) {
  if (text == "legendre") return BasisFamily::legendre();
  if (text == "chebyshev") return BasisFamily::chebyshev();
  if (text == "trig" || text == "trigonometric") return BasisFamily::trigonometric();
  try {
    if (text.starts_with("pc:")) {
      return BasisFamily::piecewise_constant_equal(std::stoi(std::string(text.substr(3))));
    }
    if (text.starts_with("shrunk:")) {
      return BasisFamily::shrunk_linear(std::stod(std::string(text.substr(7))));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidArgument*>(&e) != nullptr) throw;
    throw InvalidArgument("family: cannot parse '" + std::string(text) + "'");
  }
  throw InvalidArgument("unknown family '" + std::string(text) +
                        "' (expected legendre, chebyshev, trig, pc:<cells>, shrunk:<eps>)");
}

void eval_basis_into(const BasisFamily& family, int m, double x, std::span<double> out) {
  require_in_domain(family, x);
  family.check_dimension(m);
  switch (family.kind()) {
    case BasisKind::LegendreUniform: {
      // Un-normalised P_k by the three-term recurrence, scaled by sqrt(2k+1) at the end.
      double p_prev = 1.0;
      double p = x;
      out[0] = 1.0;
      if (m > 1) out[1] = kSqrt3 * x;
      for (int k = 1; k + 1 < m; ++k) {
        const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = p_next;
        out[static_cast<std::size_t>(k + 1)] = std::sqrt(2.0 * k + 3.0) * p;
      }
      break;
    }
    case BasisKind::ChebyshevArcsine: {
      double t_prev = 1.0;
      double t = x;
      out[0] = 1.0;
      if (m > 1) out[1] = kSqrt2 * x;
      for (int k = 2; k < m; ++k) {
        const double t_next = 2.0 * x * t - t_prev;
        t_prev = t;
        t = t_next;
        out[static_cast<std::size_t>(k)] = kSqrt2 * t;
      }
      break;
    }
    case BasisKind::TrigonometricUniform: {
      out[0] = 1.0;
      for (int j = 1; 2 * j < m; ++j) {
        out[static_cast<std::size_t>(2 * j - 1)] = kSqrt2 * std::cos(j * x);
        out[static_cast<std::size_t>(2 * j)] = kSqrt2 * std::sin(j * x);
      }
      break;
    }
    case BasisKind::PiecewiseConstant: {
      std::fill(out.begin(), out.begin() + m, 0.0);
      const int cell = family.cell_of(x);
      if (cell < m) {
        out[static_cast<std::size_t>(cell)] = 1.0 / std::sqrt(family.cell_masses()[static_cast<std::size_t>(cell)]);
      }
      break;
    }
    case BasisKind::ShrunkUniformLinear: {
      out[0] = 1.0;
      if (m > 1) out[1] = kSqrt3 * x / family.epsilon();
      break;
    }
  }
}

std::vector<double> eval_basis(const BasisFamily& family, int m, double x) {
  family.check_dimension(m);
  std::vector<double> out(static_cast<std::size_t>(m));
  eval_basis_into(family, m, x, out);
  return out;
}

double eval_expansion(const BasisFamily& family, std::span<const double> coeffs, double x) {
  const int m = static_cast<int>(coeffs.size());
  if (m == 0) {
    require_in_domain(family, x);
    return 0.0;
  }
  require_in_domain(family, x);
  switch (family.kind()) {
    case BasisKind::LegendreUniform: {
      double sum = coeffs[0];
      if (m == 1) return sum;
      double p_prev = 1.0;
      double p = x;
      sum += coeffs[1] * kSqrt3 * x;
      for (int k = 1; k + 1 < m; ++k) {
        const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = p_next;
        sum += coeffs[static_cast<std::size_t>(k + 1)] * std::sqrt(2.0 * k + 3.0) * p;
      }
      return sum;
    }
    case BasisKind::ChebyshevArcsine: {
      double tail = 0.0;
      if (m == 1) return coeffs[0];
      double t_prev = 1.0;
      double t = x;
      tail += coeffs[1] * x;
      for (int k = 2; k < m; ++k) {
        const double t_next = 2.0 * x * t - t_prev;
        t_prev = t;
        t = t_next;
        tail += coeffs[static_cast<std::size_t>(k)] * t;
      }
      return coeffs[0] + kSqrt2 * tail;
    }
    default: {
      family.check_dimension(m);
      double buf[2];
      if (family.kind() == BasisKind::ShrunkUniformLinear) {
        eval_basis_into(family, m, x, std::span<double>(buf, 2));
        return coeffs[0] * buf[0] + (m > 1 ? coeffs[1] * buf[1] : 0.0);
      }
      if (family.kind() == BasisKind::PiecewiseConstant) {
        const int cell = family.cell_of(x);
        if (cell >= m) return 0.0;
        return coeffs[static_cast<std::size_t>(cell)] /
               std::sqrt(family.cell_masses()[static_cast<std::size_t>(cell)]);
      }
      double sum = coeffs[0];
      for (int j = 1; 2 * j < m; ++j) {
        sum += kSqrt2 * (coeffs[static_cast<std::size_t>(2 * j - 1)] * std::cos(j * x) +
                         coeffs[static_cast<std::size_t>(2 * j)] * std::sin(j * x));
      }
      return sum;
    }
  }
}

double christoffel_sum(const BasisFamily& family, int m, double x) {
  const std::vector<double> v = eval_basis(family, m, x);
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

double k_of_m_analytic(const BasisFamily& family, int m) {
  family.check_dimension(m);
  switch (family.kind()) {
    case BasisKind::LegendreUniform:
      return static_cast<double>(m) * m;
    case BasisKind::ChebyshevArcsine:
      return 2.0 * m - 1.0;
    case BasisKind::TrigonometricUniform:
      return m;
    case BasisKind::PiecewiseConstant: {
      const auto& masses = family.cell_masses();
      const double smallest = *std::min_element(masses.begin(), masses.begin() + m);
      return 1.0 / smallest;
    }
    case BasisKind::ShrunkUniformLinear: {
      const double eps = family.epsilon();
      return m == 1 ? 1.0 : 1.0 + 3.0 / (eps * eps);
    }
  }
  return 0.0;
}

double k_of_m_numeric(const BasisFamily& family, int m, int grid_size) {
  if (grid_size < 2) {
    throw InvalidArgument("k_of_m_numeric: grid_size must be >= 2");
  }
  family.check_dimension(m);
  std::vector<double> buf(static_cast<std::size_t>(m));
  const double lo = family.domain_lower();
  const double hi = family.domain_upper();
  auto sum_sq = [&](double x) {
    eval_basis_into(family, m, x, buf);
    double s = 0.0;
    for (double v : buf) s += v * v;
    return s;
  };
  auto grid_point = [&](int i) {
    return i == grid_size - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (grid_size - 1);
  };

  int best_i = 0;
  double best = -1.0;
  for (int i = 0; i < grid_size; ++i) {
    const double s = sum_sq(grid_point(i));
    if (s > best) {
      best = s;
      best_i = i;
    }
  }

  // Golden-section polish on the bracket around the grid maximiser.
  double a = grid_point(std::max(best_i - 1, 0));
  double b = grid_point(std::min(best_i + 1, grid_size - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sum_sq(c);
  double fd = sum_sq(d);
  for (int it = 0; it < 80 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sum_sq(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sum_sq(d);
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

double CoefficientVector::norm() const {
  return std::sqrt(std::inner_product(coeffs.begin(), coeffs.end(), coeffs.begin(), 0.0));
}

CoefficientVector project_best(const ScalarFunction& f, const BasisFamily& family, int m, double quad_tol) {
  family.check_dimension(m);
  if (!(quad_tol > 0.0)) {
    throw InvalidArgument("project_best: quad_tol must be > 0");
  }
  QuadratureSpec spec;
  spec.tol = quad_tol;
  CoefficientVector result{family, std::vector<double>(static_cast<std::size_t>(m), 0.0)};

  if (family.kind() == BasisKind::PiecewiseConstant) {
    // Each basis function lives on one cell: <f, L_k> = rho(I_k)^{-1/2} int_{I_k} f drho.
    const auto& b = family.boundaries();
    for (int k = 0; k < m; ++k) {
      const auto sk = static_cast<std::size_t>(k);
      const QuadratureResult r = integrate_interval(family.measure(), f, b[sk], b[sk + 1], spec);
      if (!r.converged) {
        throw QuadratureError("project_best: cell integral did not converge", r.value, r.error_bound);
      }
      result.coeffs[sk] = r.value / std::sqrt(family.cell_masses()[sk]);
    }
    return result;
  }

  const Measure& mu = family.measure();
  std::vector<double> buf(static_cast<std::size_t>(m));
  auto integrand_x = [&](double x, double weight) {
    eval_basis_into(family, m, x, buf);
    const double fx = f(x) * weight;
    Eigen::VectorXd v(m);
    for (int k = 0; k < m; ++k) v[k] = fx * buf[static_cast<std::size_t>(k)];
    return v;
  };

  Eigen::VectorXd total;
  QuadratureResult r;
  if (mu.kind() == MeasureKind::ChebyshevArcsine) {
    r = detail::simpson_impl<Eigen::VectorXd>(
        [&](double t) { return integrand_x(std::cos(t), 1.0 / std::numbers::pi); }, 0.0, std::numbers::pi, spec,
        total, std::numeric_limits<double>::infinity());
  } else {
    const double w = 1.0 / (mu.upper() - mu.lower());
    r = detail::simpson_impl<Eigen::VectorXd>([&](double x) { return integrand_x(x, w); }, mu.lower(), mu.upper(),
                                              spec, total, std::numeric_limits<double>::infinity());
  }
  if (!r.converged) {
    throw QuadratureError("project_best: adaptive Simpson did not converge", total.norm(), r.error_bound);
  }
  for (int k = 0; k < m; ++k) result.coeffs[static_cast<std::size_t>(k)] = total[k];
  return result;
}

double best_error_e_m(const ScalarFunction& f, const BasisFamily& family, int m, double quad_tol) {
  QuadratureSpec spec;
  spec.tol = quad_tol;
  const double norm_sq = integrate_or_throw(family.measure(), [&](double x) { return f(x) * f(x); }, spec);
  const CoefficientVector c = project_best(f, family, m, quad_tol);
  double proj_sq = 0.0;
  for (double v : c.coeffs) proj_sq += v * v;
  return std::sqrt(std::max(0.0, norm_sq - proj_sq));
}

}  // namespace lsqstab
