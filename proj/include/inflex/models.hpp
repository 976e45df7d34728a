#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inflex/report.hpp"

namespace inflex {

using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

inline int total_order(const MultiIndex& idx) { return idx[0] + idx[1] + idx[2]; }

enum class DecayClass { none, very_moderate, moderate_n, schwartz };

struct DecayDeclaration {
  DecayClass cls = DecayClass::none;
  int order = 0;  // the n of |f| <= C/|x|^n; 1 for very_moderate, unused otherwise
};

std::string describe(const DecayDeclaration& decay);

/// Smooth function on R^dim with exact partials up to a declared order.
class FunctionModel {
 public:
  FunctionModel(int dim, int max_order, DecayDeclaration decay);
  virtual ~FunctionModel() = default;

  int dim() const { return dim_; }
  int max_partial_order() const { return max_order_; }
  const DecayDeclaration& decay() const { return decay_; }

  /// Throws OrderOverflow past max_partial_order, InvalidInput for axes >= dim.
  double partial(const MultiIndex& idx, const Point& x) const;
  double value(const Point& x) const { return partial({0, 0, 0}, x); }

  /// Canonical text in the model grammar.
  virtual std::string to_string() const = 0;
  /// True when every partial vanishes identically.
  virtual bool is_zero() const { return false; }
  /// Length over which the model varies; quadrature panels stay below it.
  virtual double feature_scale() const { return 1.0; }
  /// True when the feature scale grows with |x| (algebraic tails).
  virtual bool graded() const { return false; }

 protected:
  virtual double partial_unchecked(const MultiIndex& idx, const Point& x) const = 0;

 private:
  int dim_;
  int max_order_;
  DecayDeclaration decay_;
};

using ModelPtr = std::shared_ptr<const FunctionModel>;

inline constexpr int kMaxModelOrder = 42;

/// exp(-|x|^2 / (2 sigma^2))
ModelPtr make_gaussian(int dim, double sigma = 1.0, int max_order = kMaxModelOrder);
/// C (1 + |x|^2)^(-p)
ModelPtr make_rational(int dim, double C = 1.0, double p = 1.0, int max_order = kMaxModelOrder);
ModelPtr make_product(ModelPtr a, ModelPtr b);
/// x -> f(x - shift)
ModelPtr make_shift(ModelPtr f, Point shift);
ModelPtr make_zero(int dim);
ModelPtr make_constant(int dim, double c);

/// Grammar: gaussian{sigma=1} | rational{C=1,p=2} | product{m1,m2} |
/// shift{model,dx=..,dy=..,dz=..} | zero | constant{c=1}
ModelPtr parse_model(std::string_view text, int dim);

/// (∇²)^j f, with the declared decay class set to moderate 2j+1.
ModelPtr laplacian_iterate(ModelPtr f, int j);

/// Fits |f(r u)| r^n along seeded random rays and checks it stays bounded.
///
/// details carry the fitted constant C and the per-ray upper slopes.
VerificationReport decay_probe(const FunctionModel& f, int n, std::span<const double> radii,
                               unsigned long long seed = 1, int rays = 16);

/// decay_probe at the model's declared class (n = 8 for Schwartz models).
VerificationReport probe_declared_decay(const FunctionModel& f, std::span<const double> radii,
                                        unsigned long long seed = 1);

/// Radii 1, 2, 4, ... up to and including max_radius.
std::vector<double> doubling_radii(double max_radius);

}  // namespace inflex
