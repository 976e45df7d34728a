#pragma once

#include <functional>
#include <span>
#include <vector>

namespace inflex {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (1 ≤ order ≤ 128).
const GaussRule& gauss_legendre(int order);

/// Long double variant, used for collar polynomial integrals.
struct GaussRuleLD {
  std::vector<long double> nodes;
  std::vector<long double> weights;
};
const GaussRuleLD& gauss_legendre_ld(int order);

/// Composite 1D rule: nodes and weights mapped onto a set of panels.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  void append_panel(double lo, double hi, const GaussRule& rule);
};

/// Splits [lo, hi] into `panels` equal panels of the given order.
AxisRule uniform_panels(double lo, double hi, int panels, int order);

/// Panels over consecutive breakpoints, none wider than `max_width`.
AxisRule panels_between(std::span<const double> breakpoints, double max_width, int order);

struct Panel {
  double lo;
  double hi;
};

/// ∫|f| over consecutive panels. Each panel's Gauss nodes and end points are scanned for
/// sign changes; roots found there split the panel so every piece has one sign.
double abs_integral(const std::function<double(double)>& f, std::span<const Panel> panels, int order);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace inflex
