#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "inflex/errors.hpp"
#include "inflex/extender.hpp"

using namespace inflex;

TEST_CASE("zero model extends to zero") {
  Extension ext({2, 4.0, 3, 2, make_zero(2)});
  CHECK(ext.eval({4.01, 3.0, 0}) == 0.0);
  CHECK(ext.eval({0.5, 4.03, 0}, {1, 2, 0}) == 0.0);
  auto seams = seam_report(ext, 10);
  CHECK(seams.passed());
  for (const auto& c : seams.checks) CHECK(c.measured == 0.0);
  CHECK(norm_budget(ext).max_axis() == 0.0);
  auto norms = collar_l1(ext);
  CHECK(norms.l1 == 0.0);
  CHECK(norms.sup == 0.0);
}

TEST_CASE("missing model order is named") {
  try {
    Extension ext({2, 4.0, 3, 2, make_gaussian(2, 1.0, 4)});
    FAIL("expected an order overflow");
  } catch (const OrderOverflow& e) {
    CHECK(e.requested() == 5);
    CHECK(e.available() == 4);
    CHECK(std::string(e.what()).find("order 5") != std::string::npos);
  }
  CHECK_THROWS_AS(Extension({3, 3.0, 20, 3, make_gaussian(3)}), OrderOverflow);
  CHECK(required_model_order(2, 14) == 27);
  CHECK(required_model_order(3, 14) == 40);
}

TEST_CASE("1D gaussian extension against the collar polynomial") {
  const double m = 5.0;
  auto g = make_gaussian(1);
  Extension ext({1, m, 3, 1, g});
  CHECK(ext.width() == doctest::Approx(0.2));
  for (double x : {-5.0, -2.5, 0.0, 1.7, 5.0}) CHECK(ext.eval({x, 0, 0}) == g->value({x, 0, 0}));
  for (double x : {5.2001, 6.0, -5.21}) CHECK(ext.eval({x, 0, 0}) == 0.0);
  std::vector<double> jet;
  for (int j = 0; j < 3; ++j) jet.push_back(g->partial({j, 0, 0}, {m, 0, 0}));
  CollarPolynomial h(BoundaryJet(jet), Collar::for_m(m, 1));
  for (double t : {0.1, 0.5, 0.93})
    for (int i = 0; i <= 3; ++i) {
      const double x = m + t * ext.width();
      CHECK(ext.eval({x, 0, 0}, {i, 0, 0}) == doctest::Approx(h.eval(x, i)).epsilon(1e-12));
    }
  CHECK(seam_report(ext, 10).passed());
}

TEST_CASE("2D corner value is the composed polynomial") {
  const double m = 4.0;
  auto g = make_gaussian(2);
  Extension ext({2, m, 3, 2, g});
  const double w = ext.width();
  const double x = m + w / 2, y = m + w / 2;
  // stage y first: for each x-order j, extend the y-jet at the corner, then extend in x
  std::vector<double> xjet;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> yjet;
    for (int k = 0; k < 3; ++k) yjet.push_back(g->partial({j, k, 0}, {m, m, 0}));
    xjet.push_back(CollarPolynomial(BoundaryJet(yjet), Collar::for_m(m, 2)).eval(y));
  }
  const double oracle = CollarPolynomial(BoundaryJet(xjet), Collar::for_m(m, 2)).eval(x);
  CHECK(ext.eval({x, y, 0}) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(ext.classify({x, y, 0}) == Region::corner);
  auto seams = seam_report(ext, 10);
  CHECK(seams.checks.size() == 8);
  CHECK(seams.passed());
}

TEST_CASE("separable model gives a separable extension") {
  // exp(-|x|^2/2) is a tensor product, and so is its extension
  const double m = 3.0;
  Extension e1({1, m, 4, 3, make_gaussian(1)});
  Extension e3({3, m, 4, 3, make_gaussian(3)});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-m - 0.05, m + 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    Point p{u(rng), u(rng), u(rng)};
    if (trial % 3 == 0) p[trial % 3] = (trial % 2 ? -1 : 1) * (m + e3.width() * 0.37);
    MultiIndex idx{trial % 2, (trial / 2) % 3, trial % 2};
    const double oracle = e1.eval({p[0], 0, 0}, {idx[0], 0, 0}) * e1.eval({p[1], 0, 0}, {idx[1], 0, 0}) *
                          e1.eval({p[2], 0, 0}, {idx[2], 0, 0});
    CHECK(std::abs(e3.eval(p, idx) - oracle) <= 1e-12 * (1 + std::abs(oracle)));
  }
}

TEST_CASE("region classifier partitions space") {
  Extension ext({3, 3.0, 3, 3, make_gaussian(3)});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.1, 3.1);
  for (int i = 0; i < 10000; ++i) {
    Point p{u(rng), u(rng), u(rng)};
    const int mask = ext.collar_mask(p);
    const Region r = ext.classify(p);
    int inside_box = 0, in_collar = 0, beyond = 0;
    for (int a = 0; a < 3; ++a) {
      const double ax = std::abs(p[a]);
      inside_box += ax <= 3.0;
      in_collar += ax > 3.0 && ax <= ext.outer();
      beyond += ax > ext.outer();
    }
    CHECK(inside_box + in_collar + beyond == 3);
    if (beyond) {
      CHECK(r == Region::outside);
      CHECK(mask == -1);
      CHECK(ext.eval(p) == 0.0);
    } else {
      CHECK(static_cast<int>(r) == std::min(in_collar, 3));
    }
  }
}

TEST_CASE("budget and collar norms on a small 2D run") {
  ExtensionSpec spec{2, 4.0, 3, 2, make_gaussian(2)};
  const std::vector<double> schedule{4.0, 8.0};
  auto budget = budget_scaling(spec, schedule);
  CHECK(budget.passed());
  auto collar = collar_bound_check(spec, schedule);
  CHECK(collar.passed());
  const Extension ext(spec);
  auto b = norm_budget(ext);
  CHECK(b.cases.size() == 8);  // interior counted per axis, plus three regions per axis
  // interior part of the x budget: ∫|He_3(x) e^{-x²/2}| dx ∫ e^{-y²/2} dy over [-4, 4]
  const double oracle_x = [] {
    double s = 0;
    const int k = 400000;
    for (int i = 0; i < k; ++i) {
      const double x = -4 + 8.0 * (i + 0.5) / k;
      s += std::abs(x * x * x - 3 * x) * std::exp(-x * x / 2);
    }
    return s * 8.0 / k * std::sqrt(2 * M_PI) * std::erf(4 / std::sqrt(2.0));
  }();
  CHECK(b.cases[0].value == doctest::Approx(oracle_x).epsilon(1e-6));
}

TEST_CASE("field export writes CSV and sidecar") {
  Extension ext({2, 2.0, 3, 2, make_gaussian(2)});
  auto dir = std::filesystem::temp_directory_path() / "inflex_export_test";
  std::filesystem::create_directories(dir);
  export_field(ext, covering_grid(ext, 5), dir / "field.csv");
  std::ifstream csv(dir / "field.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x,y,value");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 25);
  CHECK(std::filesystem::exists(dir / "field.json"));
  std::filesystem::remove_all(dir);
}
