/**
 * @file bases.hpp
 * @brief Orthonormal basis families on an interval and their Christoffel sums.
 *
 * Each family is orthonormal with respect to its own probability measure:
 *
 *   LegendreUniform       L_k = sqrt(2k-1) P_{k-1}, dx/2 on [-1,1]        K(m) = m^2
 *   ChebyshevArcsine      L_1 = 1, L_k = sqrt(2) T_{k-1}, arcsine law     K(m) = 2m-1
 *   TrigonometricUniform  1, sqrt(2)cos(kx), sqrt(2)sin(kx); dx/(2pi)    K(m) = m   (m odd)
 *   PiecewiseConstant     rho(I_k)^{-1/2} 1_{I_k} for a partition          K(m) = max_k 1/rho(I_k)
 *   ShrunkUniformLinear   1, sqrt(3) x / eps; dx/(2eps) on [-eps,eps]      K(2) = 1 + 3/eps^2
 *
 * K(m) = sup_x sum_{j<=m} L_j(x)^2 is taken over the family domain, which for
 * the shrunk family is [-1,1] even though its measure lives on [-eps,eps].
 *
 * The trigonometric family is the real form of the complex exponentials
 * e^{ikx}, |k| <= p; the two span the same space and the Christoffel sum is
 * invariant under the unitary change of basis.
 */
#pragma once

#include "lsqstab/measure.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsqstab {

enum class BasisKind {
  LegendreUniform,
  ChebyshevArcsine,
  TrigonometricUniform,
  PiecewiseConstant,
  ShrunkUniformLinear,
};

class BasisFamily {
 public:
  static BasisFamily legendre();
  static BasisFamily chebyshev();
  static BasisFamily trigonometric();
  /// Partition given by sorted boundaries b_0 < b_1 < ... < b_m spanning the measure's support.
  static BasisFamily piecewise_constant(std::vector<double> boundaries, Measure measure = Measure::uniform());
  /// m cells of equal measure, boundaries obtained from the inverse CDF.
  static BasisFamily piecewise_constant_equal(int cells, Measure measure = Measure::uniform());
  static BasisFamily shrunk_linear(double epsilon);

  BasisKind kind() const noexcept { return kind_; }
  const Measure& measure() const noexcept { return measure_; }
  double domain_lower() const noexcept { return lower_; }
  double domain_upper() const noexcept { return upper_; }
  bool contains(double x) const noexcept { return x >= lower_ && x <= upper_; }

  /// Cell boundaries (PiecewiseConstant only; empty otherwise).
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  /// rho(I_k) for each cell (PiecewiseConstant only).
  const std::vector<double>& cell_masses() const noexcept { return masses_; }
  int cells() const noexcept { return static_cast<int>(masses_.size()); }
  /// Index of the cell containing x; cells are [b_{k-1}, b_k) with the last one closed.
  int cell_of(double x) const;

  double epsilon() const noexcept { return measure_.epsilon(); }

  /// Largest dimension the family can provide (cell count, 2 for the shrunk family, unbounded otherwise).
  int max_dimension() const noexcept;
  /// Throws InvalidArgument/Unsupported if m is not admissible for this family.
  void check_dimension(int m) const;

  /// Short identifier used in records and the CLI.
  std::string name() const;

 private:
  BasisFamily(BasisKind kind, Measure measure, double lower, double upper)
      : kind_(kind), measure_(measure), lower_(lower), upper_(upper) {}

  BasisKind kind_;
  Measure measure_;
  double lower_;
  double upper_;
  std::vector<double> boundaries_;
  std::vector<double> masses_;
};

/// Parses "legendre", "chebyshev", "trig", "pc:<cells>" (equal measure, uniform), "shrunk:<eps>".
BasisFamily parse_family(std::string_view text);

/// Writes (L_1(x), ..., L_m(x)) into out (size >= m). Allocation-free; the hot path of every fit.
void eval_basis_into(const BasisFamily& family, int m, double x, std::span<double> out);

/// (L_1(x), ..., L_m(x)).
std::vector<double> eval_basis(const BasisFamily& family, int m, double x);

/// sum_j u_j L_j(x), evaluated by the same recurrences as eval_basis without storing the values.
double eval_expansion(const BasisFamily& family, std::span<const double> coeffs, double x);

/// sum_{j<=m} L_j(x)^2.
double christoffel_sum(const BasisFamily& family, int m, double x);

/// Closed-form K(m).
double k_of_m_analytic(const BasisFamily& family, int m);

/// max of the Christoffel sum over a uniform grid of the domain, polished by golden-section
/// search around the grid maximiser. Never exceeds the analytic value by more than rounding.
double k_of_m_numeric(const BasisFamily& family, int m, int grid_size);

/// v = sum_j u_j L_j in the span of the first m basis functions.
struct CoefficientVector {
  BasisFamily family;
  std::vector<double> coeffs;

  int m() const noexcept { return static_cast<int>(coeffs.size()); }
  double operator()(double x) const { return eval_expansion(family, coeffs, x); }
  /// L2(rho) norm, equal to the Euclidean norm of the coefficients by orthonormality.
  double norm() const;
};

using ScalarFunction = std::function<double(double)>;

/// Coefficients <f, L_k> of the orthogonal projection onto V_m, by adaptive quadrature.
/// Throws QuadratureError if the tolerance is not met within the default depth.
CoefficientVector project_best(const ScalarFunction& f, const BasisFamily& family, int m, double quad_tol);

/// e_m(f) = ||f - P_m f|| = sqrt(||f||^2 - sum_k <f,L_k>^2), clamped at zero.
double best_error_e_m(const ScalarFunction& f, const BasisFamily& family, int m, double quad_tol);

}  // namespace lsqstab
