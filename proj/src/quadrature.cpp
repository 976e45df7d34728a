#include "inflex/quadrature.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

#include "inflex/errors.hpp"

namespace inflex {
namespace {

constexpr int kMaxOrder = 128;

template <typename Real, typename Rule>
Rule build_rule(int order) {
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const Real pi = std::numbers::pi_v<Real>;
  for (int i = 0; i < (order + 1) / 2; ++i) {
    Real x = std::cos(pi * (i + Real(0.75)) / (order + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1;
      }
      dp = order * (x * p1 - p0) / (x * x - 1);
      Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= std::numeric_limits<Real>::epsilon() * 2) break;
    }
    // recompute derivative at the converged node
    Real p0 = 1, p1 = x;
    for (int k = 2; k <= order; ++k) {
      Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1);
    Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0;
  return rule;
}

void check_order(int order) {
  if (order < 1 || order > kMaxOrder) throw InvalidInput("Gauss-Legendre order out of range");
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  check_order(order);
  static std::array<std::unique_ptr<GaussRule>, kMaxOrder + 1> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    if (order == 1) {
      slot = std::make_unique<GaussRule>(GaussRule{{0.0}, {2.0}});
    } else {
      slot = std::make_unique<GaussRule>(build_rule<double, GaussRule>(order));
    }
  }
  return *slot;
}

const GaussRuleLD& gauss_legendre_ld(int order) {
  check_order(order);
  static std::array<std::unique_ptr<GaussRuleLD>, kMaxOrder + 1> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    if (order == 1) {
      slot = std::make_unique<GaussRuleLD>(GaussRuleLD{{0.0L}, {2.0L}});
    } else {
      slot = std::make_unique<GaussRuleLD>(build_rule<long double, GaussRuleLD>(order));
    }
  }
  return *slot;
}

void AxisRule::append_panel(double lo, double hi, const GaussRule& rule) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    nodes.push_back(mid + half * rule.nodes[i]);
    weights.push_back(half * rule.weights[i]);
  }
}

AxisRule uniform_panels(double lo, double hi, int panels, int order) {
  if (panels < 1) throw InvalidInput("panel count must be positive");
  const auto& rule = gauss_legendre(order);
  AxisRule out;
  out.nodes.reserve(static_cast<std::size_t>(panels) * order);
  out.weights.reserve(static_cast<std::size_t>(panels) * order);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double b = (p + 1 == panels) ? hi : lo + (p + 1) * h;
    out.append_panel(a, b, rule);
  }
  return out;
}

AxisRule panels_between(std::span<const double> breakpoints, double max_width, int order) {
  if (breakpoints.size() < 2) throw InvalidInput("need at least two breakpoints");
  if (!(max_width > 0)) throw InvalidInput("panel width must be positive");
  const auto& rule = gauss_legendre(order);
  AxisRule out;
  for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
    const double lo = breakpoints[s], hi = breakpoints[s + 1];
    if (!(hi > lo)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * h;
      const double b = (p + 1 == panels) ? hi : lo + (p + 1) * h;
      out.append_panel(a, b, rule);
    }
  }
  return out;
}

namespace {

double signed_piece(const std::function<double(double)>& f, double lo, double hi, const GaussRule& rule) {
  const double half = (hi - lo) / 2, mid = (hi + lo) / 2;
  double s = 0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) s += rule.weights[q] * f(mid + half * rule.nodes[q]);
  return s * half;
}

}  // namespace

double abs_integral(const std::function<double(double)>& f, std::span<const Panel> panels, int order) {
  const auto& rule = gauss_legendre(order);
  double total = 0;
  std::vector<double> xs, fs;
  for (const Panel& p : panels) {
    if (!(p.hi > p.lo)) continue;
    const double half = (p.hi - p.lo) / 2, mid = (p.hi + p.lo) / 2;
    xs.assign(1, p.lo);
    fs.assign(1, f(p.lo));
    double plain = 0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      xs.push_back(mid + half * rule.nodes[q]);
      fs.push_back(f(xs.back()));
      plain += rule.weights[q] * std::abs(fs.back());
    }
    xs.push_back(p.hi);
    fs.push_back(f(p.hi));
    std::vector<double> cuts{p.lo};
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (fs[i] == 0.0 && i > 0) cuts.push_back(xs[i]);
      if (fs[i] * fs[i + 1] < 0) {
        std::uintmax_t iters = 80;
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        auto r = boost::math::tools::toms748_solve(f, xs[i], xs[i + 1], fs[i], fs[i + 1], tol, iters);
        cuts.push_back(0.5 * (r.first + r.second));
      }
    }
    cuts.push_back(p.hi);
    if (cuts.size() == 2) {
      total += plain * half;
      continue;
    }
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      if (cuts[c + 1] > cuts[c]) total += std::abs(signed_piece(f, cuts[c], cuts[c + 1], rule));
  }
  return total;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw InvalidInput("line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace inflex
