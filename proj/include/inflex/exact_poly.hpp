#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace inflex {

/// Univariate polynomial with exact rational coefficients, lowest degree first.
class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<mpq_class> coeffs);

  static RationalPoly constant(const mpq_class& c);
  /// (t - root)
  static RationalPoly linear_root(const mpq_class& root);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpq_class>& coeffs() const { return coeffs_; }
  const mpq_class& leading() const { return coeffs_.back(); }

  mpq_class eval(const mpq_class& t) const;
  int sign_at(const mpq_class& t) const;
  RationalPoly derivative() const;

  RationalPoly operator+(const RationalPoly& o) const;
  RationalPoly operator-(const RationalPoly& o) const;
  RationalPoly operator*(const RationalPoly& o) const;
  RationalPoly scaled(const mpq_class& s) const;

  /// Euclidean division; returns {quotient, remainder}.
  std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& divisor) const;

  /// Divides out repeated factors: p / gcd(p, p').
  RationalPoly square_free() const;

  /// Bound B with every real root in (-B, B).
  mpq_class root_bound() const;

  std::vector<double> to_double() const;

 private:
  void trim();
  std::vector<mpq_class> coeffs_;
};

RationalPoly gcd(RationalPoly a, RationalPoly b);

/// Sturm chain p, p', -rem(...), ... for a square-free polynomial.
class SturmSequence {
 public:
  explicit SturmSequence(const RationalPoly& square_free_poly);

  /// Sign changes of the chain at t, zeros skipped.
  int variations(const mpq_class& t) const;
  /// Number of distinct roots in the half-open interval (lo, hi].
  int count_half_open(const mpq_class& lo, const mpq_class& hi) const;
  /// Number of distinct roots in the open interval (lo, hi).
  int count_open(const mpq_class& lo, const mpq_class& hi) const;

  const RationalPoly& base() const { return chain_.front(); }
  const std::vector<RationalPoly>& chain() const { return chain_; }

 private:
  std::vector<RationalPoly> chain_;
};

/// Half-open interval (lo, hi] known to hold exactly one root.
struct RootInterval {
  mpq_class lo;
  mpq_class hi;
};

/// Isolates every distinct real root of `p` in the open interval (lo, hi).
std::vector<RootInterval> isolate_roots(const RationalPoly& p, const mpq_class& lo,
                                        const mpq_class& hi);

/// All distinct real roots of `p`, refined to double precision and sorted.
std::vector<double> real_roots(const RationalPoly& p);

/// Distinct roots of `p` inside (lo, hi), refined to double precision and sorted.
std::vector<double> roots_in(const RationalPoly& p, const mpq_class& lo, const mpq_class& hi);

/// Exact rational value of a finite double.
mpq_class exact_rational(double x);

}  // namespace inflex
