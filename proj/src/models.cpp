#include "inflex/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "inflex/errors.hpp"
#include "inflex/format.hpp"
#include "inflex/quadrature.hpp"
#include "inflex/random.hpp"

namespace inflex {
namespace {

double factorial(int n) {
  static const auto table = [] {
    std::array<double, 90> t{};
    t[0] = 1;
    for (int i = 1; i < 90; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

// Probabilists' Hermite polynomial He_k(u).
double hermite_he(int k, double u) {
  if (k == 0) return 1.0;
  double prev = 1.0, cur = u;
  for (int i = 1; i < k; ++i) {
    const double next = u * cur - i * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

class Gaussian final : public FunctionModel {
 public:
  Gaussian(int dim, double sigma, int max_order)
      : FunctionModel(dim, max_order, {DecayClass::schwartz, 0}), sigma_(sigma) {}

  std::string to_string() const override { return "gaussian{sigma=" + shortest(sigma_) + "}"; }
  double feature_scale() const override { return sigma_; }

 protected:
  double partial_unchecked(const MultiIndex& idx, const Point& x) const override {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) {
      const int k = idx[a];
      const double u = x[a] / sigma_;
      const double sign = (k % 2) ? -1.0 : 1.0;
      v *= sign * std::pow(sigma_, -k) * hermite_he(k, u) * std::exp(-0.5 * u * u);
    }
    return v;
  }

 private:
  double sigma_;
};

class Rational final : public FunctionModel {
 public:
  Rational(int dim, double c, double p, int max_order)
      : FunctionModel(dim, max_order, declared(p)), c_(c), p_(p) {}

  std::string to_string() const override {
    return "rational{C=" + shortest(c_) + ",p=" + shortest(p_) + "}";
  }
  bool is_zero() const override { return c_ == 0.0; }
  bool graded() const override { return true; }

 protected:
  // d^α φ(|x|^2) = Σ_k Π_a [i_a!/(k_a!(i_a-2k_a)!) (2x_a)^{i_a-2k_a}] φ^{(|i|-|k|)}(|x|^2)
  double partial_unchecked(const MultiIndex& idx, const Point& x) const override {
    double s = 0;
    for (int a = 0; a < dim(); ++a) s += x[a] * x[a];
    const int total = total_order(idx);
    std::vector<double> phi(static_cast<std::size_t>(total + 1));
    double falling = c_;
    for (int q = 0; q <= total; ++q) {
      phi[static_cast<std::size_t>(q)] = falling * std::pow(1 + s, -p_ - q);
      falling *= (-p_ - q);
    }
    double sum = 0;
    std::array<int, 3> k{0, 0, 0};
    const std::array<int, 3> kmax{idx[0] / 2, dim() > 1 ? idx[1] / 2 : 0, dim() > 2 ? idx[2] / 2 : 0};
    for (k[0] = 0; k[0] <= kmax[0]; ++k[0])
      for (k[1] = 0; k[1] <= kmax[1]; ++k[1])
        for (k[2] = 0; k[2] <= kmax[2]; ++k[2]) {
          double coeff = 1.0;
          int q = 0;
          for (int a = 0; a < dim(); ++a) {
            const int i = idx[a], ka = k[a];
            coeff *= factorial(i) / (factorial(ka) * factorial(i - 2 * ka));
            const int e = i - 2 * ka;
            if (e > 0) coeff *= std::pow(2 * x[a], e);
            q += i - ka;
          }
          sum += coeff * phi[static_cast<std::size_t>(q)];
        }
    return sum;
  }

 private:
  static DecayDeclaration declared(double p) {
    const int order = static_cast<int>(std::floor(2 * p + 1e-12));
    if (order <= 0) return {DecayClass::none, 0};
    if (order == 1) return {DecayClass::very_moderate, 1};
    return {DecayClass::moderate_n, order};
  }

  double c_;
  double p_;
};

DecayDeclaration combine_product(const DecayDeclaration& a, const DecayDeclaration& b) {
  // every builtin model is bounded, so a Schwartz factor dominates
  if (a.cls == DecayClass::schwartz || b.cls == DecayClass::schwartz) return {DecayClass::schwartz, 0};
  const int order = a.order + b.order;
  if (order <= 0) return {DecayClass::none, 0};
  if (order == 1) return {DecayClass::very_moderate, 1};
  return {DecayClass::moderate_n, order};
}

class Product final : public FunctionModel {
 public:
  Product(ModelPtr a, ModelPtr b)
      : FunctionModel(a->dim(), std::min(a->max_partial_order(), b->max_partial_order()),
                      combine_product(a->decay(), b->decay())),
        a_(std::move(a)),
        b_(std::move(b)) {}

  std::string to_string() const override {
    return "product{" + a_->to_string() + "," + b_->to_string() + "}";
  }
  bool is_zero() const override { return a_->is_zero() || b_->is_zero(); }
  double feature_scale() const override { return std::min(a_->feature_scale(), b_->feature_scale()); }
  bool graded() const override { return a_->graded() && b_->graded(); }

 protected:
  double partial_unchecked(const MultiIndex& idx, const Point& x) const override {
    double sum = 0;
    MultiIndex be{0, 0, 0};
    for (be[0] = 0; be[0] <= idx[0]; ++be[0])
      for (be[1] = 0; be[1] <= idx[1]; ++be[1])
        for (be[2] = 0; be[2] <= idx[2]; ++be[2]) {
          double c = 1;
          MultiIndex rest{};
          for (int a = 0; a < 3; ++a) {
            c *= factorial(idx[a]) / (factorial(be[a]) * factorial(idx[a] - be[a]));
            rest[a] = idx[a] - be[a];
          }
          sum += c * a_->partial(be, x) * b_->partial(rest, x);
        }
    return sum;
  }

 private:
  ModelPtr a_, b_;
};

class Shift final : public FunctionModel {
 public:
  Shift(ModelPtr f, Point shift)
      : FunctionModel(f->dim(), f->max_partial_order(), f->decay()), f_(std::move(f)), shift_(shift) {}

  std::string to_string() const override {
    static constexpr const char* names[] = {"dx", "dy", "dz"};
    std::string s = "shift{" + f_->to_string();
    for (int a = 0; a < dim(); ++a) s += std::string(",") + names[a] + "=" + shortest(shift_[a]);
    return s + "}";
  }
  bool is_zero() const override { return f_->is_zero(); }
  double feature_scale() const override { return f_->feature_scale(); }
  bool graded() const override { return f_->graded(); }

 protected:
  double partial_unchecked(const MultiIndex& idx, const Point& x) const override {
    return f_->partial(idx, {x[0] - shift_[0], x[1] - shift_[1], x[2] - shift_[2]});
  }

 private:
  ModelPtr f_;
  Point shift_;
};

class Constant final : public FunctionModel {
 public:
  Constant(int dim, double c)
      : FunctionModel(dim, kMaxModelOrder,
                      c == 0.0 ? DecayDeclaration{DecayClass::schwartz, 0} : DecayDeclaration{}),
        c_(c) {}

  std::string to_string() const override {
    return c_ == 0.0 ? "zero" : "constant{c=" + shortest(c_) + "}";
  }
  bool is_zero() const override { return c_ == 0.0; }

 protected:
  double partial_unchecked(const MultiIndex& idx, const Point&) const override {
    return total_order(idx) == 0 ? c_ : 0.0;
  }

 private:
  double c_;
};

class Laplacian final : public FunctionModel {
 public:
  Laplacian(ModelPtr f, int j)
      : FunctionModel(f->dim(), f->max_partial_order() - 2 * j, {DecayClass::moderate_n, 2 * j + 1}),
        f_(std::move(f)),
        j_(j) {}

  std::string to_string() const override {
    return "laplacian{" + f_->to_string() + ",j=" + std::to_string(j_) + "}";
  }
  bool is_zero() const override { return f_->is_zero(); }
  double feature_scale() const override { return f_->feature_scale(); }
  bool graded() const override { return f_->graded(); }

 protected:
  // (∇²)^j = Σ_{|β|=j} j!/β! ∂^{2β}
  double partial_unchecked(const MultiIndex& idx, const Point& x) const override {
    double sum = 0;
    const int d = dim();
    for (int b0 = 0; b0 <= j_; ++b0)
      for (int b1 = 0; b1 <= (d > 1 ? j_ - b0 : 0); ++b1) {
        const int b2 = j_ - b0 - b1;
        if (b2 > 0 && d < 3) continue;
        if (d == 1 && b0 != j_) continue;
        const double c = factorial(j_) / (factorial(b0) * factorial(b1) * factorial(b2));
        sum += c * f_->partial({idx[0] + 2 * b0, idx[1] + 2 * b1, idx[2] + 2 * b2}, x);
      }
    return sum;
  }

 private:
  ModelPtr f_;
  int j_;
};

// ---- parser ----

struct Node {
  std::string name;
  std::vector<Node> children;
  std::vector<std::pair<std::string, double>> params;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Node parse() {
    Node n = node();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing text");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("model description '" + std::string(text_) + "': " + what + " at offset " +
                       std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return v;
  }

  Node node() {
    Node n;
    n.name = ident();
    if (!accept('{')) return n;
    if (accept('}')) return n;
    do {
      const std::size_t save = pos_;
      std::string name = ident();
      if (accept('=')) {
        n.params.emplace_back(std::move(name), number());
      } else {
        pos_ = save;
        n.children.push_back(node());
      }
    } while (accept(','));
    if (!accept('}')) fail("expected '}'");
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double take(Node& n, const std::string& key, double fallback) {
  auto it = std::find_if(n.params.begin(), n.params.end(), [&](auto& p) { return p.first == key; });
  if (it == n.params.end()) return fallback;
  const double v = it->second;
  n.params.erase(it);
  return v;
}

ModelPtr build(Node n, int dim) {
  auto finish = [&](ModelPtr m, std::size_t children) {
    if (!n.params.empty()) throw InvalidInput("model '" + n.name + "': unknown parameter '" + n.params.front().first + "'");
    if (n.children.size() != children)
      throw InvalidInput("model '" + n.name + "' expects " + std::to_string(children) + " nested model(s)");
    return m;
  };
  if (n.name == "gaussian") return finish(make_gaussian(dim, take(n, "sigma", 1.0)), 0);
  if (n.name == "rational") {
    const double c = take(n, "C", 1.0);
    return finish(make_rational(dim, c, take(n, "p", 1.0)), 0);
  }
  if (n.name == "zero") return finish(make_zero(dim), 0);
  if (n.name == "constant") return finish(make_constant(dim, take(n, "c", 1.0)), 0);
  if (n.name == "product") {
    if (n.children.size() != 2) throw InvalidInput("product expects two nested models");
    return finish(make_product(build(n.children[0], dim), build(n.children[1], dim)), 2);
  }
  if (n.name == "shift") {
    if (n.children.size() != 1) throw InvalidInput("shift expects one nested model");
    Point s{take(n, "dx", 0.0), take(n, "dy", 0.0), take(n, "dz", 0.0)};
    for (int a = dim; a < 3; ++a)
      if (s[a] != 0.0) throw InvalidInput("shift along an axis beyond the model dimension");
    return finish(make_shift(build(n.children[0], dim), s), 1);
  }
  if (n.name == "laplacian") {
    if (n.children.size() != 1) throw InvalidInput("laplacian expects one nested model");
    const double j = take(n, "j", 1.0);
    if (j != std::floor(j)) throw InvalidInput("laplacian j must be an integer");
    return finish(laplacian_iterate(build(n.children[0], dim), static_cast<int>(j)), 1);
  }
  throw InvalidInput("unknown model '" + n.name + "'");
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw InvalidInput("dimension must be 1, 2 or 3");
}

}  // namespace

std::string describe(const DecayDeclaration& decay) {
  switch (decay.cls) {
    case DecayClass::none: return "none";
    case DecayClass::very_moderate: return "very_moderate";
    case DecayClass::moderate_n: return "moderate_" + std::to_string(decay.order);
    case DecayClass::schwartz: return "schwartz";
  }
  return "unknown";
}

FunctionModel::FunctionModel(int dim, int max_order, DecayDeclaration decay)
    : dim_(dim), max_order_(max_order), decay_(decay) {
  check_dim(dim);
  if (max_order < 0) throw InvalidInput("model order must be non-negative");
}

double FunctionModel::partial(const MultiIndex& idx, const Point& x) const {
  for (int a = 0; a < 3; ++a) {
    if (idx[a] < 0) throw InvalidInput("negative derivative order");
    if (a >= dim_ && idx[a] != 0) throw InvalidInput("derivative along an axis beyond the model dimension");
  }
  const int order = total_order(idx);
  if (order > max_order_)
    throw OrderOverflow("partial of order " + std::to_string(order) + " requested; model " +
                            to_string() + " provides up to order " + std::to_string(max_order_),
                        order, max_order_);
  for (int a = 0; a < dim_; ++a)
    if (!std::isfinite(x[a])) throw InvalidInput("evaluation point must be finite");
  return partial_unchecked(idx, x);
}

ModelPtr make_gaussian(int dim, double sigma, int max_order) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InvalidInput("gaussian sigma must be positive");
  if (max_order > kMaxModelOrder) throw InvalidInput("model order is capped at 42");
  return std::make_shared<Gaussian>(dim, sigma, max_order);
}

ModelPtr make_rational(int dim, double C, double p, int max_order) {
  if (!std::isfinite(C)) throw InvalidInput("rational C must be finite");
  if (!(p > 0) || !std::isfinite(p)) throw InvalidInput("rational p must be positive");
  if (max_order > kMaxModelOrder) throw InvalidInput("model order is capped at 42");
  return std::make_shared<Rational>(dim, C, p, max_order);
}

ModelPtr make_product(ModelPtr a, ModelPtr b) {
  if (!a || !b) throw InvalidInput("product of a missing model");
  if (a->dim() != b->dim()) throw InvalidInput("product of models with different dimensions");
  return std::make_shared<Product>(std::move(a), std::move(b));
}

ModelPtr make_shift(ModelPtr f, Point shift) {
  if (!f) throw InvalidInput("shift of a missing model");
  for (double s : shift)
    if (!std::isfinite(s)) throw InvalidInput("shift must be finite");
  return std::make_shared<Shift>(std::move(f), shift);
}

ModelPtr make_zero(int dim) { return std::make_shared<Constant>(dim, 0.0); }

ModelPtr make_constant(int dim, double c) {
  if (!std::isfinite(c)) throw InvalidInput("constant must be finite");
  return std::make_shared<Constant>(dim, c);
}

ModelPtr parse_model(std::string_view text, int dim) {
  check_dim(dim);
  return build(Parser(text).parse(), dim);
}

ModelPtr laplacian_iterate(ModelPtr f, int j) {
  if (!f) throw InvalidInput("laplacian of a missing model");
  if (j < 0) throw InvalidInput("laplacian power must be non-negative");
  if (j == 0) return f;
  if (2 * j > f->max_partial_order())
    throw OrderOverflow("laplacian power " + std::to_string(j) + " needs order " + std::to_string(2 * j) +
                            "; model provides " + std::to_string(f->max_partial_order()),
                        2 * j, f->max_partial_order());
  return std::make_shared<Laplacian>(std::move(f), j);
}

std::vector<double> doubling_radii(double max_radius) {
  std::vector<double> r;
  for (double x = 1; x < max_radius; x *= 2) r.push_back(x);
  r.push_back(max_radius);
  return r;
}

VerificationReport decay_probe(const FunctionModel& f, int n, std::span<const double> radii,
                               unsigned long long seed, int rays) {
  if (radii.size() < 4) throw InvalidInput("decay probe needs at least four radii");
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0)
    throw InvalidInput("decay probe radii must be positive and increasing");
  if (radii.back() < 1e3) throw InvalidInput("decay probe needs a largest radius of at least 1e3");
  if (rays < 1) throw InvalidInput("decay probe needs at least one ray");

  std::mt19937_64 rng(seed);
  double fitted_c = 0;
  double worst_slope = -std::numeric_limits<double>::infinity();
  Json slopes = Json::array();
  const std::size_t upper = radii.size() / 2;
  for (int r = 0; r < rays; ++r) {
    Point u{0, 0, 0};
    double norm = 0;
    do {
      norm = 0;
      for (int a = 0; a < f.dim(); ++a) {
        u[a] = normal(rng);
        norm += u[a] * u[a];
      }
    } while (norm < 1e-12);
    for (int a = 0; a < f.dim(); ++a) u[a] /= std::sqrt(norm);

    std::vector<double> lx, ly;
    bool underflow = false;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double rad = radii[i];
      const double v = std::abs(f.value({rad * u[0], rad * u[1], rad * u[2]})) * std::pow(rad, n);
      if (rad >= 1) fitted_c = std::max(fitted_c, v);
      if (i < upper) continue;
      if (!(v > 0) || !std::isfinite(v)) {
        underflow = underflow || v == 0;
        continue;
      }
      lx.push_back(std::log(rad));
      ly.push_back(std::log(v));
    }
    double slope = -std::numeric_limits<double>::infinity();
    if (lx.size() >= 2 && !underflow) slope = fit_line(lx, ly).slope;
    worst_slope = std::max(worst_slope, slope);
    slopes.push_back(std::isfinite(slope) ? Json(slope) : Json("-inf"));
  }
  VerificationReport rep;
  rep.name = "decay_probe";
  // bounded along each ray: |f| r^n must not grow over the upper radii
  constexpr double slack = 0.05;
  rep.add_upper("upper_slope", worst_slope, 0.0, slack, "log-log slope of |f| r^n over the upper radii");
  rep.details["n"] = n;
  rep.details["fitted_C"] = fitted_c;
  rep.details["ray_slopes"] = std::move(slopes);
  rep.details["declared"] = describe(f.decay());
  return rep;
}

VerificationReport probe_declared_decay(const FunctionModel& f, std::span<const double> radii,
                                        unsigned long long seed) {
  switch (f.decay().cls) {
    case DecayClass::none: return decay_probe(f, 0, radii, seed);
    case DecayClass::very_moderate: return decay_probe(f, 1, radii, seed);
    case DecayClass::moderate_n: return decay_probe(f, f.decay().order, radii, seed);
    case DecayClass::schwartz: return decay_probe(f, 8, radii, seed);
  }
  return {};
}

}  // namespace inflex
