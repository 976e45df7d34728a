#include "inflex/polyext.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>

#include "inflex/errors.hpp"
#include "inflex/quadrature.hpp"

namespace inflex {
namespace {

long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

long double falling(int n, int k) {
  long double r = 1;
  for (int i = 0; i < k; ++i) r *= (n - i);
  return r;
}

long double ipow(long double x, int e) {
  long double r = 1;
  const bool inv = e < 0;
  for (int i = 0; i < std::abs(e); ++i) r *= x;
  return inv ? 1 / r : r;
}

mpq_class ipow(const mpq_class& x, int e) {
  mpq_class r(1);
  for (int i = 0; i < std::abs(e); ++i) r *= x;
  return e < 0 ? mpq_class(1 / r) : r;
}

}  // namespace

BoundaryJet::BoundaryJet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("boundary jet must hold at least one value");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidInput("boundary jet values must be finite");
}

double BoundaryJet::max_abs() const {
  double m = 0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool BoundaryJet::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

Collar::Collar(double inner_edge, double width, Orientation orientation)
    : inner_(inner_edge), width_(width), orientation_(orientation) {
  if (!std::isfinite(inner_edge)) throw InvalidInput("collar inner edge must be finite");
  if (!(width > 0) || !std::isfinite(width)) throw InvalidInput("collar width must be positive");
}

Collar Collar::for_m(double m, int collar_exponent, Orientation orientation) {
  if (!(m > 0)) throw InvalidInput("m must be positive");
  if (collar_exponent < 1 || collar_exponent > 3) throw InvalidInput("collar exponent must be 1, 2 or 3");
  const double width = 1.0 / std::pow(m, collar_exponent);
  return Collar(orientation == Orientation::increasing ? m : -m, width, orientation);
}

bool Collar::contains(double x) const {
  const double t = to_unit(x);
  return t >= 0 && t <= 1;
}

std::string_view to_string(SignClass s) {
  switch (s) {
    case SignClass::positive_definite: return "positive_definite";
    case SignClass::negative_definite: return "negative_definite";
    case SignClass::indefinite: return "indefinite";
    case SignClass::identically_zero: return "identically_zero";
  }
  return "unknown";
}

template <typename Scalar>
std::vector<Scalar> solve_unit_jet_system(std::span<const Scalar> scaled_jet) {
  const int n = static_cast<int>(scaled_jet.size());
  std::vector<Scalar> g(static_cast<std::size_t>(n));
  const int diag = (n % 2 == 0) ? 1 : -1;  // (-1)^n
  Scalar fact(1);
  for (int i = 0; i < n; ++i) {
    if (i > 0) fact *= i;
    Scalar rhs = scaled_jet[static_cast<std::size_t>(i)] / fact;
    for (int l = 1; l <= i; ++l) {
      const int s = ((n - l) % 2 == 0) ? 1 : -1;
      Scalar entry(static_cast<long>(binomial(n, l)) * s);
      rhs -= entry * g[static_cast<std::size_t>(i - l)];
    }
    g[static_cast<std::size_t>(i)] = rhs * diag;
  }
  return g;
}

template std::vector<long double> solve_unit_jet_system<long double>(std::span<const long double>);
template std::vector<mpq_class> solve_unit_jet_system<mpq_class>(std::span<const mpq_class>);

std::vector<long double> solve_jet_coefficients(const BoundaryJet& jet, const Collar& collar) {
  const int n = jet.order();
  const long double w = collar.width();
  const long double s = collar.sign();
  std::vector<long double> scaled(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) scaled[static_cast<std::size_t>(i)] = ipow(s * w, i) * jet[i];
  auto g = solve_unit_jet_system<long double>(scaled);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] *= ipow(s, n + i) / ipow(w, n + i);
  return g;
}

UnitCollarBasis::UnitCollarBasis(int n) : n_(n) {
  if (n < 1 || n > 20) throw InvalidInput("collar order must lie in [1, 20]");
  long double fact = 1;
  for (int j = 0; j < n; ++j) {
    if (j > 0) fact *= j;
    factorial_.push_back(fact);
    std::vector<long double> data(static_cast<std::size_t>(n), 0.0L);
    data[static_cast<std::size_t>(j)] = fact;
    k_.push_back(solve_unit_jet_system<long double>(data));
  }
  // K_j^{(r)} coefficients and the product-rule weights C(i,l) n!/(n-l)!
  kd_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < n; ++r) {
      std::vector<long double> c;
      for (int q = r; q < n; ++q) c.push_back(k_[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] * falling(q, r));
      kd_[static_cast<std::size_t>(j)].push_back(std::move(c));
    }
  for (int i = 0; i < 2 * n; ++i) {
    std::vector<long double> row;
    for (int l = 0; l <= std::min(i, n); ++l) row.push_back(binomial(i, l) * falling(n, l));
    lc_.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    RationalPoly h = exact(j);
    double best = 0;
    std::vector<double> candidates = roots_in(h.derivative(), mpq_class(0), mpq_class(1));
    candidates.push_back(0.0);
    candidates.push_back(1.0);
    for (double t : candidates) best = std::max(best, std::abs(static_cast<double>(derivative(j, 0, t))));
    sup_.push_back(best);
  }
}

std::span<const long double> UnitCollarBasis::integer_coeffs(int j) const {
  return k_.at(static_cast<std::size_t>(j));
}

long double UnitCollarBasis::derivative(int j, int i, long double t) const {
  if (i >= 2 * n_) return 0.0L;
  const auto& kd = kd_[static_cast<std::size_t>(j)];
  const auto& lc = lc_[static_cast<std::size_t>(i)];
  std::array<long double, 21> pw;  // (t-1)^k
  pw[0] = 1;
  for (int q = 1; q <= n_; ++q) pw[static_cast<std::size_t>(q)] = pw[static_cast<std::size_t>(q - 1)] * (t - 1);
  long double total = 0;
  for (int l = std::max(0, i - n_ + 1); l <= std::min(i, n_); ++l) {
    const auto& c = kd[static_cast<std::size_t>(i - l)];  // derivative order i-l falls on K_j
    long double kr = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) kr = kr * t + *it;
    total += lc[static_cast<std::size_t>(l)] * pw[static_cast<std::size_t>(n_ - l)] * kr;
  }
  return total / factorial_[static_cast<std::size_t>(j)];
}

RationalPoly UnitCollarBasis::exact(int j) const {
  std::vector<mpq_class> kc;
  for (long double c : k_.at(static_cast<std::size_t>(j))) kc.push_back(exact_rational(static_cast<double>(c)));
  RationalPoly poly(std::move(kc));
  RationalPoly t_minus_one({mpq_class(-1), mpq_class(1)});
  for (int i = 0; i < n_; ++i) poly = poly * t_minus_one;
  mpz_class fact(1);
  for (int i = 2; i <= j; ++i) fact *= i;
  return poly.scaled(mpq_class(1, 1) / mpq_class(fact));
}

const UnitCollarBasis& unit_collar_basis(int n) {
  if (n < 1 || n > 20) throw InvalidInput("collar order must lie in [1, 20]");
  static std::array<std::unique_ptr<UnitCollarBasis>, 21> cache;
  static std::array<std::once_flag, 21> once;
  const auto slot = static_cast<std::size_t>(n);
  std::call_once(once[slot], [&] { cache[slot] = std::make_unique<UnitCollarBasis>(n); });
  return *cache[slot];
}

CollarBasis::CollarBasis(int n, Collar collar) : basis_(&unit_collar_basis(n)), collar_(collar) {}

double CollarBasis::value(int j, int deriv, double x) const {
  const long double s = collar_.sign();
  const long double w = collar_.width();
  const long double t =
      x == collar_.outer_edge() ? 1.0L : s * (static_cast<long double>(x) - collar_.inner_edge()) / w;
  const long double scale = ipow(s, deriv + j) * ipow(w, j - deriv);
  return static_cast<double>(scale * basis_->derivative(j, deriv, t));
}

void CollarBasis::values(int deriv, double x, std::span<double> out) const {
  for (int j = 0; j < order(); ++j) out[static_cast<std::size_t>(j)] = value(j, deriv, x);
}

CollarPolynomial::CollarPolynomial(BoundaryJet jet, Collar collar)
    : jet_(std::move(jet)), collar_(collar), coeffs_(solve_jet_coefficients(jet_, collar_)) {
  if (jet_.order() > 20) throw InvalidInput("collar order must not exceed 20");
}

long double CollarPolynomial::eval_ld(long double x, int deriv) const {
  if (!std::isfinite(static_cast<double>(x))) throw InvalidInput("evaluation point must be finite");
  if (deriv < 0) throw InvalidInput("derivative order must be non-negative");
  const auto& basis = unit_collar_basis(order());
  const long double s = collar_.sign();
  const long double w = collar_.width();
  // the stored outer edge is the collar's end point, whatever its rounding
  const long double t = x == collar_.outer_edge() ? 1.0L : s * (x - collar_.inner_edge()) / w;
  long double total = 0;
  for (int j = 0; j < order(); ++j) {
    if (jet_[j] == 0.0) continue;
    total += jet_[j] * ipow(s, deriv + j) * ipow(w, j - deriv) * basis.derivative(j, deriv, t);
  }
  return total;
}

RationalPoly CollarPolynomial::exact_unit() const {
  const auto& basis = unit_collar_basis(order());
  const mpq_class sw = exact_rational(collar_.sign() * collar_.width());
  RationalPoly total;
  for (int j = 0; j < order(); ++j) {
    if (jet_[j] == 0.0) continue;
    total = total + basis.exact(j).scaled(exact_rational(jet_[j]) * ipow(sw, j));
  }
  return total;
}

RationalPoly CollarPolynomial::exact_unit_nth() const {
  RationalPoly p = exact_unit();
  for (int i = 0; i < order(); ++i) p = p.derivative();
  return p;
}

SignClass check_sign_definite(const CollarPolynomial& poly) {
  if (poly.jet().is_zero()) return SignClass::identically_zero;
  RationalPoly p = poly.exact_unit_nth();
  if (p.is_zero()) return SignClass::identically_zero;
  const int at_inner = p.sign_at(mpq_class(0));
  if (at_inner == 0) return SignClass::indefinite;
  if (p.degree() > 0) {
    SturmSequence sturm(p.square_free());
    if (sturm.count_open(mpq_class(0), mpq_class(1)) > 0) return SignClass::indefinite;
  }
  // h^(n)(x) = (s/w)^n p(t)
  int sign = at_inner;
  if (poly.collar().orientation() == Orientation::decreasing && poly.order() % 2 == 1) sign = -sign;
  return sign > 0 ? SignClass::positive_definite : SignClass::negative_definite;
}

double nth_derivative_l1(const CollarPolynomial& poly) {
  if (poly.jet().is_zero()) return 0.0;
  const int n = poly.order();
  std::vector<double> cuts{0.0};
  for (double t : roots_in(poly.exact_unit_nth(), mpq_class(0), mpq_class(1))) cuts.push_back(t);
  cuts.push_back(1.0);
  const auto& rule = gauss_legendre_ld(std::max(4, n + 2));
  const long double w = poly.collar().width();
  long double total = 0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const long double lo = cuts[s], hi = cuts[s + 1];
    const long double half = (hi - lo) / 2, mid = (hi + lo) / 2;
    long double piece = 0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const long double t = mid + half * rule.nodes[q];
      const long double x = poly.collar().inner_edge() + poly.collar().sign() * w * t;
      piece += rule.weights[q] * poly.eval_ld(x, n);
    }
    total += std::abs(piece * half);
  }
  return static_cast<double>(total * w);
}

double sup_norm(const CollarPolynomial& poly) {
  if (poly.jet().is_zero()) return 0.0;
  std::vector<double> candidates = roots_in(poly.exact_unit().derivative(), mpq_class(0), mpq_class(1));
  candidates.push_back(0.0);
  candidates.push_back(1.0);
  long double best = 0;
  for (double t : candidates) {
    const long double x = poly.collar().inner_edge() +
                          static_cast<long double>(poly.collar().sign()) * poly.collar().width() * t;
    best = std::max(best, std::abs(poly.eval_ld(x, 0)));
  }
  return static_cast<double>(best);
}

std::vector<double> nth_derivative_roots(const CollarPolynomial& poly) {
  if (poly.jet().is_zero()) return {};
  std::vector<double> out;
  for (double t : real_roots(poly.exact_unit_nth())) out.push_back(poly.collar().from_unit(t));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> nth_derivative_collar_roots(const CollarPolynomial& poly) {
  if (poly.jet().is_zero()) return {};
  std::vector<double> out;
  for (double t : roots_in(poly.exact_unit_nth(), mpq_class(0), mpq_class(1)))
    out.push_back(poly.collar().from_unit(t));
  std::sort(out.begin(), out.end());
  return out;
}

AdmissibleM min_admissible_m(const BoundaryJet& jet, int collar_exponent) {
  AdmissibleM result;
  for (int k = 1; k <= 20; ++k) {
    const double m = std::ldexp(1.0, k);
    CollarPolynomial poly(jet, Collar::for_m(m, collar_exponent));
    result.last_sign = check_sign_definite(poly);
    result.scanned = k;
    if (is_definite(result.last_sign) || result.last_sign == SignClass::identically_zero) {
      result.m = m;
      return result;
    }
  }
  return result;
}

}  // namespace inflex
