#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "inflex/errors.hpp"
#include "inflex/spectral.hpp"

using namespace inflex;

namespace {

constexpr double kPi = std::numbers::pi;

double gaussian_ft(double sigma, const WaveVector& k, int dim) {
  double k2 = 0;
  for (int a = 0; a < dim; ++a) k2 += k[a] * k[a];
  return std::pow(sigma, dim) * std::exp(-0.5 * sigma * sigma * k2);
}

// plain tensor Gauss–Legendre with its own panel layout
double volume_integral(const std::function<double(const Point&)>& f, int dim, std::span<const double> cuts,
                       int per_segment) {
  AxisRule rule;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
    for (int p = 0; p < per_segment; ++p) {
      const double lo = cuts[s] + (cuts[s + 1] - cuts[s]) * p / per_segment;
      const double hi = cuts[s] + (cuts[s + 1] - cuts[s]) * (p + 1) / per_segment;
      rule.append_panel(lo, hi, gauss_legendre(12));
    }
  const std::size_t n = rule.size();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < (dim > 1 ? n : 1); ++j)
      for (std::size_t l = 0; l < (dim > 2 ? n : 1); ++l) {
        const Point x{rule.nodes[i], dim > 1 ? rule.nodes[j] : 0.0, dim > 2 ? rule.nodes[l] : 0.0};
        total += f(x) * rule.weights[i] * (dim > 1 ? rule.weights[j] : 1) * (dim > 2 ? rule.weights[l] : 1);
      }
  return total;
}

}  // namespace

TEST_CASE("zero source transforms to zero") {
  const TransformPlan plan(model_source(make_zero(2)), 10.0);
  CHECK(plan.at({3.0, -1.0, 0}).value == Complex(0, 0));
  Extension ext({1, 4.0, 3, 1, make_zero(1)});
  CHECK(ft_point(extension_source(ext), {7.0, 0, 0}).value == Complex(0, 0));
}

TEST_CASE("gaussian transforms match the closed form") {
  const auto g1 = make_gaussian(1);
  const TransformPlan p1(model_source(g1), 8.0);
  for (double k : {0.0, 0.5, 1.0, 2.0, 3.5, 6.0}) {
    const SpectralValue v = p1.at({k, 0, 0});
    CHECK(std::abs(v.value - gaussian_ft(1.0, {k, 0, 0}, 1)) < 1e-10);
  }
  // truncation at a fixed radius of 12
  FourierSource boxed = model_source(g1);
  boxed.breakpoints[0] = {-12.0, 12.0};
  for (double k : {0.3, 1.7, 4.0}) CHECK(std::abs(ft_point(boxed, {k, 0, 0}).value - gaussian_ft(1.0, {k, 0, 0}, 1)) < 1e-10);

  const auto g2 = make_gaussian(2, 1.5);
  const TransformPlan p2(model_source(g2), 4.0);
  for (const WaveVector& k : {WaveVector{0.4, -1.1, 0}, WaveVector{2.0, 0.7, 0}})
    CHECK(std::abs(p2.at(k).value - gaussian_ft(1.5, k, 2)) < 1e-10);

  const auto g3 = make_gaussian(3, 0.8);
  const TransformPlan p3(model_source(g3), 3.0);
  for (const WaveVector& k : {WaveVector{0.4, -1.1, 2.0}, WaveVector{-3.0, 0.2, 0.9}})
    CHECK(std::abs(p3.at(k).value - gaussian_ft(0.8, k, 3)) < 1e-10);
  CHECK(p3.source().tail_bound < 1e-10 * std::pow(2 * kPi * 0.64, 1.5));
}

TEST_CASE("zero frequency is the normalized volume integral") {
  Extension ext({3, 3.0, 3, 3, make_gaussian(3)});
  const double F0 = ft_point(extension_source(ext), {0, 0, 0}).value.real();
  const std::vector<double> cuts{-ext.outer(), -ext.m(), ext.m(), ext.outer()};
  const double vol = volume_integral([&](const Point& x) { return ext.eval(x); }, 3, cuts, 3);
  CHECK(std::abs(F0 - std::pow(2 * kPi, -1.5) * vol) < 1e-9);
}

TEST_CASE("real sources are conjugate symmetric and transforms are linear") {
  Extension ext({2, 4.0, 3, 2, make_gaussian(2)});
  const TransformPlan plan(extension_source(ext), 12.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  for (int i = 0; i < 10; ++i) {
    const WaveVector k{u(rng), u(rng), 0};
    const Complex a = plan.at(k).value, b = plan.at({-k[0], -k[1], 0}).value;
    CHECK(std::abs(a - std::conj(b)) < 1e-10);
  }
  const auto f = make_gaussian(1, 0.7), g = make_rational(1, 2.0, 2.0);
  FourierSource sum = model_source(f);
  const FourierSource gs = model_source(g);
  sum.breakpoints[0] = gs.breakpoints[0];
  sum.graded = true;
  sum.f = [&](const Point& x) { return 3.0 * f->value(x) - 0.5 * g->value(x); };
  const TransformPlan ps(sum, 6.0), pf(model_source(f), 6.0), pg(gs, 6.0);
  for (double k : {0.25, 1.0, 2.5, 5.5}) {
    const Complex lhs = ps.at({k, 0, 0}).value;
    const Complex rhs = 3.0 * pf.at({k, 0, 0}).value - 0.5 * pg.at({k, 0, 0}).value;
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("Plancherel for gaussians") {
  for (int dim : {1, 2}) {
    const auto g = make_gaussian(dim, 1.2);
    const double space = std::pow(kPi * 1.44, 0.5 * dim);  // ∫ e^{-|x|²/σ²}
    const TransformPlan plan(model_source(g), 9.0);
    const AxisRule rule = uniform_panels(-9.0, 9.0, 18, 12);
    std::array<std::vector<double>, 3> axes{rule.nodes, dim > 1 ? rule.nodes : std::vector<double>{0.0}, {0.0}};
    const auto vals = plan.on_grid(axes);
    double freq = 0;
    for (std::size_t i = 0; i < axes[0].size(); ++i)
      for (std::size_t j = 0; j < axes[1].size(); ++j)
        freq += std::norm(vals[i * axes[1].size() + j]) * rule.weights[i] * (dim > 1 ? rule.weights[j] : 1.0);
    CHECK(std::abs(freq - space) < 1e-6 * space);
  }
}

TEST_CASE("grid transform by FFT") {
  auto g = make_gaussian(1);
  GridSpec grid;
  grid.counts = {241, 1, 1};
  grid.origin = {-12.0, 0, 0};
  grid.spacing = {0.1, 1, 1};
  const SampledField field = sample_field([&](const Point& x) { return g->value(x); }, 1, grid);
  const SpectralField spec = ft_grid(field);
  double worst = 0;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const WaveVector k = spec.k_at(i);
    if (std::abs(k[0]) > 10) continue;
    worst = std::max(worst, std::abs(spec.values[i] - gaussian_ft(1.0, k, 1)));
    CHECK(std::abs(spec.values[i] - ft_grid_at(field, k)) < 1e-12);
  }
  CHECK(worst < 1e-6);
  CHECK_THROWS_AS(ft_grid_at(field, {32.0, 0, 0}), AliasingError);

  SampledField zero = field;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  for (const Complex& v : ft_grid(zero).values) CHECK(v == Complex(0, 0));

  // 2D FFT against the direct sum, including the origin phase
  GridSpec g2;
  g2.counts = {24, 17, 1};
  g2.origin = {-2.3, -1.1, 0};
  g2.spacing = {0.2, 0.15, 1};
  const SampledField f2 = sample_field([](const Point& x) { return std::exp(-x[0] * x[0] - 2 * x[1] * x[1]) * (1 + x[0]); }, 2, g2);
  const SpectralField s2 = ft_grid(f2);
  for (std::size_t i = 0; i < s2.values.size(); i += 7) CHECK(std::abs(s2.values[i] - ft_grid_at(f2, s2.k_at(i))) < 1e-12);
}

TEST_CASE("grid transform converges to the quadrature transform") {
  Extension ext({1, 2.0, 3, 1, make_gaussian(1)});
  const TransformPlan plan(extension_source(ext), 6.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::vector<WaveVector> ks;
  for (int i = 0; i < 20; ++i) ks.push_back({u(rng), 0, 0});
  std::vector<double> errors;
  for (double h : {0.04, 0.02, 0.01}) {
    GridSpec grid;
    grid.counts = {static_cast<int>(std::lround(6.0 / h)) + 1, 1, 1};
    grid.origin = {-3.0, 0, 0};
    grid.spacing = {h, 1, 1};
    const SampledField field = sample_field([&](const Point& x) { return ext.eval(x); }, 1, grid);
    double worst = 0;
    for (const auto& k : ks) worst = std::max(worst, std::abs(ft_grid_at(field, k) - plan.at(k).value));
    errors.push_back(worst);
  }
  CHECK(errors[1] * 4 <= errors[0]);
  CHECK(errors[2] * 4 <= errors[1]);
}

TEST_CASE("decay exponent fits") {
  Extension ext({1, 2.0, 3, 1, make_gaussian(1)});
  const DecayFit e = decay_exponent_fit(extension_source(ext), {1, 0, 0}, 5.0, 50.0);
  CHECK_FALSE(e.rejected);
  CHECK(e.exponent <= -2.5);
  const DecayFit g = decay_exponent_fit(model_source(make_gaussian(1)), {1, 0, 0}, 2.0, 6.0);
  CHECK_FALSE(g.rejected);
  CHECK(g.exponent < -6.0);
  const DecayFit z = decay_exponent_fit(model_source(make_zero(2)), {1, 1, 0}, 2.0, 20.0);
  CHECK(z.rejected);
  CHECK_THROWS_AS(decay_exponent_fit(model_source(make_gaussian(2)), {1, 0, 0}, 2.0, 6.0), InvalidInput);
}

TEST_CASE("decay bound check on 1D extensions and an adversarial step") {
  const auto ks = generic_k_samples(1, 24, 5.0, 50.0, 3);
  for (const auto& k : ks) CHECK(std::abs(k[0]) >= 5.0);
  const std::vector<double> ms{4.0, 8.0, 16.0};
  const auto rep = decay_bound_check(ExtensionSpec{1, 0.0, 3, 1, make_gaussian(1)}, ms, ks);
  CHECK(rep.passed());
  const auto zero = decay_bound_check(ExtensionSpec{1, 0.0, 3, 1, make_zero(1)}, ms, ks);
  CHECK(zero.passed());
  CHECK(zero.details["D"].get<double>() == 0.0);

  // steps of height m^2 on [-1, 1]: |F| |k|^3 / m grows with m instead of staying bounded
  std::vector<std::pair<double, SpectralFn>> steps;
  for (double m : ms) {
    GridSpec grid;
    grid.counts = {1001, 1, 1};
    grid.origin = {-1.0, 0, 0};
    grid.spacing = {0.002, 1, 1};
    auto field = std::make_shared<SampledField>(sample_field(
        [m](const Point& x) { return std::abs(x[0]) < 1 - 1e-9 ? m * m : 0.5 * m * m; }, 1, grid));
    for (double k : {0.5, 3.0, 20.0}) {
      const double exact = std::sqrt(2 / kPi) * m * m * std::sin(k) / k;
      CHECK(std::abs(ft_grid_at(*field, {k, 0, 0}) - exact) < 1e-3 * m * m);
    }
    steps.emplace_back(m, [field](const WaveVector& k) { return ft_grid_at(*field, k); });
  }
  CHECK_FALSE(decay_bound_check(steps, 1, 3, ks).passed());
}

TEST_CASE("alpha minimum") {
  CHECK(std::abs(alpha_min(2).value - 1.0) < 1e-12);
  CHECK(std::abs(alpha_min(4).value - 1.0 / 3.0) < 1e-9);
  const AlphaMin a14 = alpha_min(14);
  CHECK(std::abs(a14.value - 1.0 / 729.0) < 1e-9);
  CHECK(std::abs(alpha(14, a14.theta, a14.phi) - a14.value) < 1e-15);
  CHECK_THROWS_AS(alpha_min(3), InvalidInput);

  // direct minimum of Σ|u_i|^p over random unit vectors
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  double best = 1e9;
  for (int i = 0; i < 1000000; ++i) {
    double u[3] = {nd(rng), nd(rng), nd(rng)};
    const double len = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    double s = 0;
    for (double c : u) s += std::pow(std::abs(c / len), 14);
    best = std::min(best, s);
  }
  CHECK(best >= a14.value - 1e-15);
  CHECK(best - a14.value < 1e-6);
}

TEST_CASE("ratio identities") {
  const std::array<WaveVector, 1> k1{WaveVector{2.0, 0, 0}};
  const auto r1 = verify_ratio_identities(make_gaussian(1), k1);
  CHECK(r1.passed());
  CHECK(r1.details["max_residual"].get<double>() < 1e-9);
  const auto ks = generic_k_samples(3, 4, 0.5, 5.0, 21);
  CHECK(verify_ratio_identities(make_rational(3, 1.0, 6.0), ks).passed());
  const std::array<WaveVector, 1> bad{WaveVector{0.0, 1.0, 0}};
  CHECK_THROWS_AS(verify_ratio_identities(make_gaussian(2), bad), InvalidInput);
}

TEST_CASE("convergence fit preconditions") {
  const std::vector<double> mags{0.5, 2.0};
  const auto region = axis_avoiding_region(2, mags);
  CHECK(region.size() == 16);
  const std::vector<double> one{4.0};
  CHECK_THROWS_AS(ft_convergence(ExtensionSpec{2, 0.0, 3, 2, make_gaussian(2)}, one, region), InvalidInput);
  const std::vector<double> ms{4.0, 8.0};
  CHECK(ft_convergence(ExtensionSpec{2, 0.0, 3, 2, make_zero(2)}, ms, region).passed());
  const std::vector<double> m1{2.0, 3.0, 4.0};
  const auto one_d = ft_convergence(ExtensionSpec{1, 0.0, 3, 1, make_gaussian(1)}, m1,
                                    axis_avoiding_region(1, mags));
  CHECK(one_d.passed());
}

TEST_CASE("inversion of gaussian spectral data") {
  SpectralSource g;
  g.dim = 1;
  g.value = [](const WaveVector& k) { return Complex(std::exp(-0.5 * k[0] * k[0]), 0); };
  g.support = 6.0;
  std::vector<Point> xs;
  for (int i = 0; i < 10; ++i) xs.push_back({-2.0 + 4.0 * i / 9, 0, 0});
  const auto res = inverse_at_points(g, xs, 10.0, 1e-8);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(res[i].value - std::exp(-0.5 * xs[i][0] * xs[i][0])) < 1e-6);
  CHECK_THROWS_AS(inverse_at_points(g, xs, 2.0, 1e-8), AccuracyFailure);

  SpectralSource zero;
  zero.dim = 2;
  zero.value = [](const WaveVector&) { return Complex(0, 0); };
  CHECK(inverse_at_point(zero, {0.3, 0.1, 0}, 5.0, 1e-12).value == 0.0);

  const std::vector<double> ms{4.0, 8.0};
  const auto rep = inversion_error(ExtensionSpec{1, 0.0, 3, 1, make_gaussian(1)}, ms, xs, 0.0, 1e-5);
  CHECK(rep.passed());
}

TEST_CASE("radial limit") {
  const std::vector<double> radii{0.5, 0.1, 1e-2, 1e-3};
  const std::vector<double> deeper{0.5, 0.1, 1e-2, 1e-3, 1e-5};
  const auto g = radial_limit_check(make_gaussian(3), 0.9, 0.4, deeper);
  CHECK(g.passed());
  for (const auto& v : g.details["values"]) {
    const double r = v["r"].get<double>();
    CHECK(std::abs(v["r_abs_F"].get<double>() - r * std::exp(-0.5 * r * r)) < 1e-10);
  }
  CHECK(radial_limit_check(make_rational(3, 1.0, 6.0), 1.0, 0.7, radii).passed());
  CHECK_THROWS_AS(radial_limit_check(make_gaussian(3), kPi / 2, kPi / 2, radii), InvalidInput);
  CHECK(generic_direction(1.0, 0.3, 3));
  CHECK_FALSE(generic_direction(0.0, 0.3, 3));
}

TEST_CASE("power-law tails") {
  const L1Tail t = l1_tail(1.0, -14.0, 3, 2.0);
  CHECK_FALSE(t.divergent);
  CHECK(t.value == doctest::Approx(4 * kPi * std::pow(2.0, -11.0) / 11.0).epsilon(1e-14));
  CHECK(l1_tail(1.0, -2.0, 3, 2.0).divergent);
  const PowerTail gt = spectral_tail([](const WaveVector& k) { return Complex(std::exp(-0.5 * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2])), 0); }, 3, 10.0);
  CHECK(gt.tail < 1e-12);
  const PowerTail pt = spectral_tail([](const WaveVector& k) { return Complex(std::pow(norm(k, 2), -5.0), 0); }, 2, 3.0);
  CHECK(pt.exponent == doctest::Approx(-5.0).epsilon(1e-9));
  CHECK(pt.tail == doctest::Approx(2 * kPi * std::pow(3.0, -3.0) / 3.0).epsilon(1e-9));
  const auto w = weighted_ball_integrals(make_gaussian(2), 4.0);
  CHECK(w.passed());
  CHECK(w.checks.size() == 5);
}
