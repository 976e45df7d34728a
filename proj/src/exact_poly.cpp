#include "inflex/exact_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inflex/errors.hpp"

namespace inflex {

RationalPoly::RationalPoly(std::vector<mpq_class> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

RationalPoly RationalPoly::constant(const mpq_class& c) { return RationalPoly({c}); }

RationalPoly RationalPoly::linear_root(const mpq_class& root) {
  return RationalPoly({mpq_class(-root), mpq_class(1)});
}

void RationalPoly::trim() {
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
}

mpq_class RationalPoly::eval(const mpq_class& t) const {
  mpq_class acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= t;
    acc += *it;
  }
  return acc;
}

int RationalPoly::sign_at(const mpq_class& t) const { return sgn(eval(t)); }

RationalPoly RationalPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<mpq_class> out(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out[i - 1] = coeffs_[i] * static_cast<long>(i);
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::operator+(const RationalPoly& o) const {
  std::vector<mpq_class> out(std::max(coeffs_.size(), o.coeffs_.size()));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) out[i] += o.coeffs_[i];
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::operator-(const RationalPoly& o) const { return *this + o.scaled(-1); }

RationalPoly RationalPoly::operator*(const RationalPoly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<mpq_class> out(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::scaled(const mpq_class& s) const {
  std::vector<mpq_class> out(coeffs_);
  for (auto& c : out) c *= s;
  return RationalPoly(std::move(out));
}

std::pair<RationalPoly, RationalPoly> RationalPoly::divmod(const RationalPoly& divisor) const {
  if (divisor.is_zero()) throw InvalidInput("polynomial division by zero");
  std::vector<mpq_class> rem(coeffs_);
  const int dd = divisor.degree();
  if (degree() < dd) return {RationalPoly{}, *this};
  std::vector<mpq_class> quot(static_cast<std::size_t>(degree() - dd + 1));
  const mpq_class& lead = divisor.leading();
  for (int k = degree() - dd; k >= 0; --k) {
    mpq_class q = rem[static_cast<std::size_t>(k + dd)] / lead;
    quot[static_cast<std::size_t>(k)] = q;
    if (sgn(q) == 0) continue;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= q * divisor.coeffs_[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {RationalPoly(std::move(quot)), RationalPoly(std::move(rem))};
}

RationalPoly gcd(RationalPoly a, RationalPoly b) {
  while (!b.is_zero()) {
    auto r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.scaled(1 / mpq_class(a.leading()));
}

RationalPoly RationalPoly::square_free() const {
  if (degree() <= 1) return *this;
  RationalPoly g = gcd(*this, derivative());
  if (g.degree() <= 0) return *this;
  return divmod(g).first;
}

mpq_class RationalPoly::root_bound() const {
  if (degree() <= 0) return mpq_class(1);
  mpq_class m(0);
  for (int i = 0; i < degree(); ++i) {
    mpq_class r = abs(coeffs_[static_cast<std::size_t>(i)] / leading());
    if (r > m) m = r;
  }
  m += 1;
  // round up to a power of two so bisection stays dyadic
  mpz_class p(1);
  while (mpq_class(p) < m) p *= 2;
  return mpq_class(p);
}

std::vector<double> RationalPoly::to_double() const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.get_d());
  return out;
}

SturmSequence::SturmSequence(const RationalPoly& p) {
  if (p.is_zero()) throw InvalidInput("Sturm sequence of the zero polynomial");
  chain_.push_back(p);
  if (p.degree() == 0) return;
  chain_.push_back(p.derivative());
  while (chain_.back().degree() > 0) {
    auto rem = chain_[chain_.size() - 2].divmod(chain_.back()).second;
    if (rem.is_zero()) break;
    // positive rescaling keeps signs; it only tames coefficient growth
    mpq_class lead = abs(rem.leading());
    chain_.push_back(rem.scaled(-1 / lead));
  }
}

int SturmSequence::variations(const mpq_class& t) const {
  int changes = 0;
  int last = 0;
  for (const auto& q : chain_) {
    const int s = q.sign_at(t);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::count_half_open(const mpq_class& lo, const mpq_class& hi) const {
  if (!(lo < hi)) return 0;
  return variations(lo) - variations(hi);
}

int SturmSequence::count_open(const mpq_class& lo, const mpq_class& hi) const {
  if (!(lo < hi)) return 0;
  return count_half_open(lo, hi) - (base().sign_at(hi) == 0 ? 1 : 0);
}

namespace {

double refine(const SturmSequence& sturm, RootInterval iv) {
  const RationalPoly& p = sturm.base();
  if (p.sign_at(iv.hi) == 0) return iv.hi.get_d();
  const mpq_class tiny(mpz_class(1), mpz_class(1) << 1000);
  for (int iter = 0; iter < 2000; ++iter) {
    mpq_class width = iv.hi - iv.lo;
    mpq_class scale = std::max(abs(iv.lo), abs(iv.hi));
    if (width * (mpz_class(1) << 60) <= scale || width < tiny) break;
    mpq_class mid = (iv.lo + iv.hi) / 2;
    const int smid = p.sign_at(mid);
    if (smid == 0) return mid.get_d();
    const int slo = p.sign_at(iv.lo);
    if (slo != 0) {
      if (slo != smid) iv.hi = mid; else iv.lo = mid;
    } else if (sturm.count_half_open(iv.lo, mid) == 1) {
      iv.hi = mid;
    } else {
      iv.lo = mid;
    }
  }
  mpq_class mid = (iv.lo + iv.hi) / 2;
  return mid.get_d();
}

}  // namespace

std::vector<RootInterval> isolate_roots(const RationalPoly& poly, const mpq_class& lo,
                                        const mpq_class& hi) {
  std::vector<RootInterval> found;
  if (poly.degree() <= 0 || !(lo < hi)) return found;
  SturmSequence sturm(poly.square_free());
  std::vector<RootInterval> stack{{lo, hi}};
  while (!stack.empty()) {
    RootInterval iv = stack.back();
    stack.pop_back();
    int count = sturm.count_half_open(iv.lo, iv.hi);
    // the outer interval is open on the right
    if (iv.hi == hi && sturm.base().sign_at(hi) == 0) --count;
    if (count <= 0) continue;
    if (count == 1 && !(iv.hi == hi && sturm.base().sign_at(hi) == 0)) {
      found.push_back(iv);
      continue;
    }
    mpq_class mid = (iv.lo + iv.hi) / 2;
    stack.push_back({mid, iv.hi});
    stack.push_back({iv.lo, mid});
  }
  std::sort(found.begin(), found.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
  return found;
}

std::vector<double> roots_in(const RationalPoly& poly, const mpq_class& lo, const mpq_class& hi) {
  std::vector<double> roots;
  if (poly.degree() <= 0) return roots;
  RationalPoly sf = poly.square_free();
  SturmSequence sturm(sf);
  for (const auto& iv : isolate_roots(sf, lo, hi)) roots.push_back(refine(sturm, iv));
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> real_roots(const RationalPoly& poly) {
  if (poly.degree() <= 0) return {};
  mpq_class b = poly.root_bound();
  return roots_in(poly, -b, b);
}

mpq_class exact_rational(double x) {
  if (!std::isfinite(x)) throw InvalidInput("non-finite value has no rational form");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

}  // namespace inflex
