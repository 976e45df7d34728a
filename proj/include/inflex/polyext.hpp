#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "inflex/exact_poly.hpp"

namespace inflex {

/// Derivative data (a_0, ..., a_{n-1}) matched at a collar's inner edge.
class BoundaryJet {
 public:
  explicit BoundaryJet(std::vector<double> values);

  int order() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  double max_abs() const;
  bool is_zero() const;

 private:
  std::vector<double> values_;
};

enum class Orientation { increasing, decreasing };

/// The interval between an inner edge `a` and the outer edge `a ± w`.
///
/// Decreasing collars are handled through the mirror x -> 2a - x, so every
/// construction below works on the unit collar t = ±(x - a)/w in [0, 1].
class Collar {
 public:
  Collar(double inner_edge, double width, Orientation orientation = Orientation::increasing);

  /// [m, m + 1/m^d] (or its mirror [-m - 1/m^d, -m]).
  static Collar for_m(double m, int collar_exponent,
                      Orientation orientation = Orientation::increasing);

  double inner_edge() const { return inner_; }
  double width() const { return width_; }
  Orientation orientation() const { return orientation_; }
  double sign() const { return orientation_ == Orientation::increasing ? 1.0 : -1.0; }
  double outer_edge() const { return inner_ + sign() * width_; }
  double to_unit(double x) const { return sign() * (x - inner_) / width_; }
  double from_unit(double t) const { return inner_ + sign() * width_ * t; }
  bool contains(double x) const;

 private:
  double inner_;
  double width_;
  Orientation orientation_;
};

enum class SignClass { positive_definite, negative_definite, indefinite, identically_zero };

std::string_view to_string(SignClass s);
inline bool is_definite(SignClass s) {
  return s == SignClass::positive_definite || s == SignClass::negative_definite;
}

/// Forward substitution for the jet system on the unit collar.
///
/// Row i of the system is sum_{l<=i} C(n,l) (-1)^{n-l} g_{i-l} = data_i / i!, which
/// is lower triangular with unit-modulus diagonal; the solution g gives
/// h(t) = (t-1)^n sum_i g_i t^i.
template <typename Scalar>
std::vector<Scalar> solve_unit_jet_system(std::span<const Scalar> scaled_jet);

/// Coefficients c_i with h(x) = (x - b)^n sum_i c_i (x - a)^i.
std::vector<long double> solve_jet_coefficients(const BoundaryJet& jet, const Collar& collar);

/// Hermite basis on the unit collar: H_j^{(i)}(0) = δ_ij and H_j^{(i)}(1) = 0 for i < n.
///
/// H_j(t) = (t-1)^n K_j(t) / j! with integer K_j, so endpoint derivatives
/// evaluate exactly in floating point.
class UnitCollarBasis {
 public:
  explicit UnitCollarBasis(int n);

  int order() const { return n_; }
  std::span<const long double> integer_coeffs(int j) const;
  /// d^i/dt^i H_j(t).
  long double derivative(int j, int i, long double t) const;
  /// max_{t in [0,1]} |H_j(t)|
  double sup_abs(int j) const { return sup_[static_cast<std::size_t>(j)]; }
  /// H_j as an exact polynomial in t.
  RationalPoly exact(int j) const;

 private:
  int n_;
  std::vector<std::vector<long double>> k_;
  std::vector<long double> factorial_;
  std::vector<std::vector<std::vector<long double>>> kd_;
  std::vector<std::vector<long double>> lc_;
  std::vector<double> sup_;
};

/// Shared, lazily built basis for n in [1, 20].
const UnitCollarBasis& unit_collar_basis(int n);

/// Unit basis carried onto a concrete collar: B_j^{(i)}(x) = s^{i+j} w^{j-i} H_j^{(i)}(t).
class CollarBasis {
 public:
  CollarBasis(int n, Collar collar);

  int order() const { return basis_->order(); }
  const Collar& collar() const { return collar_; }
  double value(int j, int deriv, double x) const;
  /// All n basis derivatives of order `deriv` at x.
  void values(int deriv, double x, std::span<double> out) const;

 private:
  const UnitCollarBasis* basis_;
  Collar collar_;
};

/// One-sided extension polynomial h of degree 2n-1 on a collar.
class CollarPolynomial {
 public:
  CollarPolynomial(BoundaryJet jet, Collar collar);

  const BoundaryJet& jet() const { return jet_; }
  const Collar& collar() const { return collar_; }
  int order() const { return jet_.order(); }
  int degree() const { return jet_.is_zero() ? -1 : 2 * order() - 1; }
  std::span<const long double> inner_coeffs() const { return coeffs_; }

  double eval(double x, int deriv = 0) const { return static_cast<double>(eval_ld(x, deriv)); }
  long double eval_ld(long double x, int deriv = 0) const;

  /// h on the unit collar, h(a + s w t), as an exact polynomial in t.
  RationalPoly exact_unit() const;
  /// (s/w)^{-n} h^{(n)} on the unit collar, exact.
  RationalPoly exact_unit_nth() const;

 private:
  BoundaryJet jet_;
  Collar collar_;
  std::vector<long double> coeffs_;
};

SignClass check_sign_definite(const CollarPolynomial& poly);

/// ∫ over the collar of |h^{(n)}|, split at the sign changes of h^{(n)}.
double nth_derivative_l1(const CollarPolynomial& poly);

/// max |h| on the closed collar.
double sup_norm(const CollarPolynomial& poly);

/// Real roots of h^{(n)} (in x), sorted.
std::vector<double> nth_derivative_roots(const CollarPolynomial& poly);
/// Roots of h^{(n)} strictly inside the collar (in x), sorted.
std::vector<double> nth_derivative_collar_roots(const CollarPolynomial& poly);

struct AdmissibleM {
  std::optional<double> m;  // empty when the doubling schedule is exhausted
  SignClass last_sign = SignClass::indefinite;
  int scanned = 0;
};

/// Smallest m in {2, 4, ..., 2^20} at which the collar [m, m + 1/m^d] gives a
/// definite (or identically zero) h^{(n)}.
AdmissibleM min_admissible_m(const BoundaryJet& jet, int collar_exponent);

}  // namespace inflex
