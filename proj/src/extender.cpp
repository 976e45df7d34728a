#include "inflex/extender.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include "inflex/config.hpp"
#include "inflex/errors.hpp"
#include "inflex/format.hpp"
#include "inflex/quadrature.hpp"

namespace inflex {
namespace {

constexpr const char* kAxisName[] = {"x", "y", "z"};

std::vector<int> stage_order(int dim) {
  if (dim == 1) return {0};
  if (dim == 2) return {1, 0};
  return {0, 1, 2};
}

int default_exponent(int dim) { return dim; }

std::vector<MultiIndex> indices_up_to(int dim, int order) {
  std::vector<MultiIndex> out;
  for (int i = 0; i <= order; ++i)
    for (int j = 0; j <= (dim > 1 ? order - i : 0); ++j)
      for (int k = 0; k <= (dim > 2 ? order - i - j : 0); ++k) out.push_back({i, j, k});
  return out;
}

std::string mask_name(int mask, int dim) {
  if (mask == 0) return "interior";
  std::string axes;
  for (int a = 0; a < dim; ++a)
    if (mask & (1 << a)) axes += kAxisName[a];
  const int count = std::popcount(static_cast<unsigned>(mask));
  if (count == dim && dim > 1) return "corner";
  if (count == 1) return axes + "-collar";
  return axes + "-edge";
}

// Collar axes integrate over both collars; interior axes over [-m, m]. Across a collar
// the extension is a polynomial of degree 2n-1, so one panel per side is exact.
std::vector<Panel> axis_panels(const Extension& ext, bool collar) {
  std::vector<Panel> out;
  const double m = ext.m();
  if (collar) {
    out.push_back({-ext.outer(), -m});
    out.push_back({m, ext.outer()});
    return out;
  }
  const int panels = std::max(2, static_cast<int>(std::ceil(2 * m / 0.5)));
  for (int p = 0; p < panels; ++p)
    out.push_back({-m + 2 * m * p / panels, (p + 1 == panels) ? m : -m + 2 * m * (p + 1) / panels});
  return out;
}

int axis_order(const Extension& ext, bool collar) { return collar ? std::max(10, ext.order()) : 8; }

AxisRule axis_rule(const Extension& ext, bool collar) {
  AxisRule r;
  const GaussRule& rule = gauss_legendre(axis_order(ext, collar));
  for (const Panel& p : axis_panels(ext, collar)) r.append_panel(p.lo, p.hi, rule);
  return r;
}

// ∫|g| over the region of one collar mask: tensor rule across, sign-split line integrals along `axis`.
double region_abs_integral(const Extension& ext, int mask, int axis, const std::function<double(const Point&)>& g) {
  std::array<AxisRule, 3> rules;
  for (int a = 0; a < 3; ++a) {
    if (a < ext.dim() && a != axis) {
      rules[a] = axis_rule(ext, mask & (1 << a));
    } else {
      rules[a].nodes = {0.0};
      rules[a].weights = {1.0};
    }
  }
  const auto panels = axis_panels(ext, mask & (1 << axis));
  double total = 0;
  for (std::size_t i = 0; i < rules[0].size(); ++i)
    for (std::size_t j = 0; j < rules[1].size(); ++j)
      for (std::size_t k = 0; k < rules[2].size(); ++k) {
        Point p{rules[0].nodes[i], rules[1].nodes[j], rules[2].nodes[k]};
        const double w = rules[0].weights[i] * rules[1].weights[j] * rules[2].weights[k];
        total += w * abs_integral(
                         [&](double x) {
                           p[axis] = x;
                           return g(p);
                         },
                         panels, axis_order(ext, mask & (1 << axis)));
      }
  return total;
}

}  // namespace

std::string_view to_string(Region r) {
  switch (r) {
    case Region::interior: return "interior";
    case Region::face: return "face";
    case Region::edge: return "edge";
    case Region::corner: return "corner";
    case Region::outside: return "outside";
  }
  return "unknown";
}

int required_model_order(int dim, int n) { return (dim - 1) * (n - 1) + n; }

Extension::Extension(ExtensionSpec spec) : spec_(std::move(spec)) {
  if (spec_.dim < 1 || spec_.dim > 3) throw InvalidInput("extension dimension must be 1, 2 or 3");
  if (!spec_.model) throw InvalidInput("extension needs a model");
  if (spec_.model->dim() != spec_.dim) throw InvalidInput("model dimension differs from the extension");
  if (!(spec_.m > 1) || !std::isfinite(spec_.m)) throw InvalidInput("m must be a finite number above 1");
  if (spec_.order_n < 3 || spec_.order_n > 20) throw InvalidInput("extension order n must lie in [3, 20]");
  if (spec_.collar_exponent == 0) spec_.collar_exponent = default_exponent(spec_.dim);
  if (spec_.collar_exponent < 1 || spec_.collar_exponent > 3)
    throw InvalidInput("collar exponent d must be 1, 2 or 3");
  const int need = required_model_order(spec_.dim, spec_.order_n);
  if (spec_.model->max_partial_order() < need)
    throw OrderOverflow("extension of order " + std::to_string(spec_.order_n) + " in " +
                            std::to_string(spec_.dim) + "D needs model partials of order " +
                            std::to_string(need) + "; model " + spec_.model->to_string() +
                            " provides up to " + std::to_string(spec_.model->max_partial_order()),
                        need, spec_.model->max_partial_order());

  const Collar c = Collar::for_m(spec_.m, spec_.collar_exponent);
  width_ = c.width();
  outer_ = c.outer_edge();
  if (!(width_ < spec_.m)) throw InvalidInput("collar width must be below m");
  stages_ = stage_order(spec_.dim);
  basis_ = &unit_collar_basis(spec_.order_n);
  for (int e = -2 * spec_.order_n; e <= spec_.order_n; ++e) wpow_.push_back(std::pow(static_cast<long double>(width_), e));

  // sign of the top normal derivative on sampled face jets
  const int n = spec_.order_n;
  sign_samples_ = Json::array();
  for (int level = 1; level <= spec_.dim; ++level) {
    const int axis = stages_[static_cast<std::size_t>(level - 1)];
    for (int side : {1, -1}) {
      std::array<int, 5> counts{};
      std::optional<double> worst_m = 0.0;
      bool exhausted = false;
      std::vector<Point> faces;
      const std::array<double, 5> frac{-0.9, -0.45, 0.0, 0.45, 0.9};
      std::vector<int> tangential;
      for (int b = 0; b < spec_.dim; ++b)
        if (b != axis) tangential.push_back(b);
      const std::size_t combos = tangential.empty() ? 1 : (tangential.size() == 1 ? 5 : 25);
      for (std::size_t s = 0; s < combos; ++s) {
        Point q{0, 0, 0};
        q[axis] = side * spec_.m;
        if (tangential.size() >= 1) q[tangential[0]] = frac[s % 5] * spec_.m;
        if (tangential.size() >= 2) q[tangential[1]] = frac[s / 5] * spec_.m;
        std::vector<double> jet(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
          MultiIndex idx{0, 0, 0};
          idx[axis] = j;
          jet[static_cast<std::size_t>(j)] = eval_level(level - 1, q, idx);
        }
        const auto orient = side > 0 ? Orientation::increasing : Orientation::decreasing;
        CollarPolynomial h(BoundaryJet(jet), Collar::for_m(spec_.m, spec_.collar_exponent, orient));
        ++counts[static_cast<std::size_t>(check_sign_definite(h))];
        const AdmissibleM adm = min_admissible_m(BoundaryJet(jet), spec_.collar_exponent);
        if (adm.m) {
          worst_m = std::max(*worst_m, *adm.m);
        } else {
          exhausted = true;
        }
      }
      Json face;
      face["face"] = std::string(side > 0 ? "+" : "-") + kAxisName[axis];
      face["stage"] = level;
      face["samples"] = combos;
      face["positive_definite"] = counts[0];
      face["negative_definite"] = counts[1];
      face["indefinite"] = counts[2];
      face["identically_zero"] = counts[3];
      if (exhausted) {
        face["m_min"] = nullptr;
      } else {
        face["m_min"] = *worst_m;
      }
      sign_samples_.push_back(std::move(face));
    }
  }
}

Extension build_extension(ExtensionSpec spec) { return Extension(std::move(spec)); }

double Extension::eval_level(int level, const Point& x, const MultiIndex& idx) const {
  if (level == 0) return spec_.model->partial(idx, x);
  const int axis = stages_[static_cast<std::size_t>(level - 1)];
  const double xa = x[axis];
  const double ax = std::abs(xa);
  if (ax <= spec_.m) return eval_level(level - 1, x, idx);
  if (ax > outer_) return 0.0;
  const int side = xa > 0 ? 1 : -1;
  // unit collar coordinate; the stored outer edge maps to 1 exactly
  const long double t = ax == outer_ ? 1.0L : (static_cast<long double>(ax) - spec_.m) / width_;
  const int n = spec_.order_n;
  const int i = idx[axis];
  Point q = x;
  q[axis] = side * spec_.m;
  long double sum = 0;
  MultiIndex jdx = idx;
  for (int j = 0; j < n; ++j) {
    jdx[axis] = j;
    const double v = eval_level(level - 1, q, jdx);
    if (v == 0.0) continue;
    // B_j^{(i)}(x) = s^{i+j} w^{j-i} H_j^{(i)}(t)
    const long double b = wpow_[static_cast<std::size_t>(j - i + 2 * n)] * basis_->derivative(j, i, t);
    sum += ((side < 0 && (i + j) % 2) ? -b : b) * v;
  }
  return static_cast<double>(sum);
}

double Extension::eval(const Point& x, const MultiIndex& idx) const {
  for (int a = 0; a < 3; ++a) {
    if (idx[a] < 0 || (a >= dim() && idx[a] != 0)) throw InvalidInput("invalid multi-index for this extension");
    if (a < dim() && !std::isfinite(x[a])) throw InvalidInput("evaluation point must be finite");
  }
  if (total_order(idx) > spec_.order_n) throw InvalidInput("extension partials are available up to order n");
  if (spec_.model->is_zero()) return 0.0;
  return eval_level(dim(), x, idx);
}

int Extension::collar_mask(const Point& x) const {
  int mask = 0;
  for (int a = 0; a < dim(); ++a) {
    const double ax = std::abs(x[a]);
    if (ax > outer_) return -1;
    if (ax > spec_.m) mask |= 1 << a;
  }
  return mask;
}

Region Extension::classify(const Point& x) const {
  const int mask = collar_mask(x);
  if (mask < 0) return Region::outside;
  const int count = std::popcount(static_cast<unsigned>(mask));
  if (count == 0) return Region::interior;
  if (count == dim() && dim() > 1) return Region::corner;
  return count == 1 ? Region::face : Region::edge;
}

VerificationReport seam_report(const Extension& ext, int samples_per_seam) {
  if (samples_per_seam < 10) throw InvalidInput("seam report needs at least 10 samples per seam");
  VerificationReport rep;
  rep.name = "seam_report";
  const int dim = ext.dim(), n = ext.order();
  const auto indices = indices_up_to(dim, n - 1);
  const double delta = 1e-4 * ext.width();
  const double lim = ext.outer();

  std::vector<double> line;
  for (int s = 0; s < samples_per_seam; ++s) line.push_back(-lim + 2 * lim * s / (samples_per_seam - 1));

  // one-sided limit from three points at distance delta, delta/2, delta/4
  auto limit = [&](Point p, int axis, double seam, double dir, const MultiIndex& idx) {
    std::array<double, 3> v{};
    for (int k = 0; k < 3; ++k) {
      p[axis] = seam + dir * delta / (1 << k);
      v[static_cast<std::size_t>(k)] = ext.eval(p, idx);
    }
    return (8 * v[2] - 6 * v[1] + v[0]) / 3;
  };

  Json per_seam = Json::array();
  for (int axis = 0; axis < dim; ++axis) {
    std::vector<int> tangential;
    for (int b = 0; b < dim; ++b)
      if (b != axis) tangential.push_back(b);
    const std::size_t count = tangential.empty() ? 1 : (tangential.size() == 1 ? line.size() : line.size() * line.size());
    for (int side : {1, -1})
      for (int outer : {0, 1}) {
        const double seam = side * (outer ? ext.outer() : ext.m());
        double worst = 0;
        for (std::size_t s = 0; s < count; ++s) {
          Point p{0, 0, 0};
          if (tangential.size() >= 1) p[tangential[0]] = line[s % line.size()];
          if (tangential.size() >= 2) p[tangential[1]] = line[s / line.size()];
          for (const auto& idx : indices) {
            const double inside = limit(p, axis, seam, -side, idx);
            const double outside = limit(p, axis, seam, side, idx);
            const double scale = std::max({1.0, std::abs(inside), std::abs(outside)});
            worst = std::max(worst, std::abs(inside - outside) / scale);
          }
        }
        const std::string name = std::string(side > 0 ? "+" : "-") + kAxisName[axis] +
                                 (outer ? " outer seam" : " inner seam");
        rep.add_upper(name, worst, kDefaultTolerances.seam_rel, 0.0,
                      "max relative jump of partials through order " + std::to_string(n - 1));
        per_seam.push_back({{"seam", name}, {"samples", count}, {"max_jump", worst}});
      }
  }
  rep.details["seams"] = std::move(per_seam);
  rep.details["limit_offset"] = delta;
  return rep;
}

double NormBudget::max_axis() const { return *std::max_element(per_axis.begin(), per_axis.end()); }

NormBudget norm_budget(const Extension& ext) {
  const int dim = ext.dim(), n = ext.order();
  std::vector<int> masks;
  if (dim == 1) masks = {1};
  if (dim == 2) masks = {2, 1, 3};
  if (dim == 3) masks = {1, 2, 3, 4, 5, 6, 7};

  std::vector<std::array<double, 3>> totals(static_cast<std::size_t>(1 << dim), {0, 0, 0});
  for (int mask = 0; mask < (1 << dim); ++mask) {
    auto& t = totals[static_cast<std::size_t>(mask)];
    if (ext.spec().model->is_zero()) continue;
    for (int a = 0; a < dim; ++a) {
      MultiIndex idx{0, 0, 0};
      idx[a] = n;
      t[a] = region_abs_integral(ext, mask, a, [&](const Point& p) { return ext.eval(p, idx); });
    }
  }

  NormBudget out;
  int case_no = 1;
  for (int a = 0; a < dim; ++a) {
    out.cases.push_back({"case 1: d" + std::to_string(n) + "/d" + kAxisName[a] + ", interior", a, 0, totals[0][a]});
    out.per_axis[a] += totals[0][a];
  }
  for (int a = 0; a < dim; ++a)
    for (int mask : masks) {
      ++case_no;
      const double v = totals[static_cast<std::size_t>(mask)][a];
      out.cases.push_back({"case " + std::to_string(case_no) + ": d" + std::to_string(n) + "/d" + kAxisName[a] +
                               ", " + mask_name(mask, dim),
                           a, mask, v});
      out.per_axis[a] += v;
    }
  return out;
}

VerificationReport budget_scaling(const ExtensionSpec& base, std::span<const double> m_schedule) {
  if (m_schedule.empty()) throw InvalidInput("budget scaling needs an m schedule");
  VerificationReport rep;
  rep.name = "norm_budget";
  std::vector<double> lm, lb, gs;
  Json runs = Json::array();
  double g = 0;
  const int dim = base.dim;
  for (std::size_t i = 0; i < m_schedule.size(); ++i) {
    ExtensionSpec spec = base;
    spec.m = m_schedule[i];
    const Extension ext(spec);
    const NormBudget b = norm_budget(ext);
    const double total = b.max_axis();
    const double scaled = total / std::pow(spec.m, dim);
    if (i == 0) g = scaled;
    rep.add_upper("budget <= G m^" + std::to_string(dim) + " at m=" + shortest(spec.m), total,
                  g * std::pow(spec.m, dim), 1e-9 * (1 + total), "G fitted at the smallest m");
    if (i > 0)
      rep.add_upper("G non-increasing at m=" + shortest(spec.m), scaled, gs.back(), 1e-9 * gs.back());
    gs.push_back(scaled);
    if (total > 0) {
      lm.push_back(std::log(spec.m));
      lb.push_back(std::log(total));
    }
    Json run;
    run["m"] = spec.m;
    run["width"] = ext.width();
    run["per_axis"] = Json::array();
    for (int a = 0; a < dim; ++a) run["per_axis"].push_back(b.per_axis[a]);
    run["scaled_G"] = scaled;
    Json cases = Json::array();
    for (const auto& c : b.cases) cases.push_back({{"case", c.label}, {"value", c.value}});
    run["cases"] = std::move(cases);
    runs.push_back(std::move(run));
  }
  if (lm.size() >= 2) {
    const double slope = fit_line(lm, lb).slope;
    rep.add_upper("log-log slope of budget vs m", slope, dim + kDefaultTolerances.budget_slope_slack, 0.0);
  }
  rep.details["G"] = g;
  rep.details["runs"] = std::move(runs);
  return rep;
}

CollarNorms collar_l1(const Extension& ext) {
  CollarNorms out;
  if (ext.spec().model->is_zero()) return out;
  const int dim = ext.dim(), n = ext.order();
  const auto& basis = unit_collar_basis(n);
  double s = 0;
  for (int j = 0; j < n; ++j) s += basis.sup_abs(j);

  double face_max = 0;
  for (int mask = 1; mask < (1 << dim); ++mask) {
    out.l1 += region_abs_integral(ext, mask, 0, [&](const Point& p) {
      const double v = ext.eval(p);
      out.sup = std::max(out.sup, std::abs(v));
      return v;
    });
    // jets feeding this region: partials of order <= n-1 along the collar axes at the box surface
    std::array<AxisRule, 3> rules;
    for (int a = 0; a < 3; ++a) {
      if (a < dim && !(mask & (1 << a))) {
        rules[a] = axis_rule(ext, false);
      } else if (a < dim) {
        rules[a].nodes = {-ext.m(), ext.m()};
        rules[a].weights = {1, 1};
      } else {
        rules[a].nodes = {0.0};
        rules[a].weights = {1};
      }
    }
    std::vector<MultiIndex> jets;
    for (const auto& idx : indices_up_to(dim, dim * (n - 1))) {
      bool ok = true;
      for (int a = 0; a < dim; ++a)
        if ((!(mask & (1 << a)) && idx[a] != 0) || idx[a] > n - 1) ok = false;
      if (ok) jets.push_back(idx);
    }
    for (double x : rules[0].nodes)
      for (double y : rules[1].nodes)
        for (double z : rules[2].nodes)
          for (const auto& idx : jets) face_max = std::max(face_max, std::abs(ext.spec().model->partial(idx, {x, y, z})));
  }
  out.sup_bound = std::pow(s, dim) * face_max;
  return out;
}

VerificationReport collar_bound_check(const ExtensionSpec& base, std::span<const double> m_schedule) {
  if (m_schedule.empty()) throw InvalidInput("collar bound check needs an m schedule");
  VerificationReport rep;
  rep.name = "collar_l1";
  std::vector<CollarNorms> norms;
  double d_bound = 0;
  for (double m : m_schedule) {
    ExtensionSpec spec = base;
    spec.m = m;
    norms.push_back(collar_l1(Extension(spec)));
    d_bound = std::max(d_bound, norms.back().sup_bound);
  }
  const double e = norms.front().l1 * m_schedule.front();
  Json runs = Json::array();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double m = m_schedule[i];
    const double l1m = norms[i].l1 * m;
    rep.add_upper("L1*m <= E at m=" + shortest(m), l1m, e, 1e-9 * (1 + e), "E fitted at the smallest m");
    rep.add_upper("collar sup <= D at m=" + shortest(m), norms[i].sup, d_bound, 1e-12,
                  "D from chained basis and face-partial bounds");
    runs.push_back({{"m", m}, {"l1", norms[i].l1}, {"l1_times_m", l1m}, {"sup", norms[i].sup},
                    {"sup_bound", norms[i].sup_bound}});
  }
  rep.details["E"] = e;
  rep.details["D"] = d_bound;
  rep.details["runs"] = std::move(runs);
  return rep;
}

GridSpec covering_grid(const Extension& ext, int points, double pad) {
  if (points < 2) throw InvalidInput("grid needs at least two points per axis");
  GridSpec g;
  const double half = ext.outer() * pad;
  for (int a = 0; a < ext.dim(); ++a) {
    g.counts[a] = points;
    g.origin[a] = -half;
    g.spacing[a] = 2 * half / (points - 1);
  }
  return g;
}

void export_field(const Extension& ext, const GridSpec& grid, const std::filesystem::path& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw InvalidInput("cannot write " + csv_path.string());
  const int dim = ext.dim();
  for (int a = 0; a < dim; ++a) csv << kAxisName[a] << ',';
  csv << "value\n";
  for (int i = 0; i < grid.counts[0]; ++i)
    for (int j = 0; j < (dim > 1 ? grid.counts[1] : 1); ++j)
      for (int k = 0; k < (dim > 2 ? grid.counts[2] : 1); ++k) {
        const Point p{grid.origin[0] + i * grid.spacing[0], grid.origin[1] + j * grid.spacing[1],
                      grid.origin[2] + k * grid.spacing[2]};
        for (int a = 0; a < dim; ++a) csv << shortest(p[a]) << ',';
        csv << shortest(ext.eval(p)) << '\n';
      }
  Json side;
  side["dims"] = Json::array();
  side["spacing"] = Json::array();
  side["origin"] = Json::array();
  for (int a = 0; a < dim; ++a) {
    side["dims"].push_back(grid.counts[a]);
    side["spacing"].push_back(grid.spacing[a]);
    side["origin"].push_back(grid.origin[a]);
  }
  side["m"] = ext.m();
  side["n"] = ext.order();
  side["d"] = ext.spec().collar_exponent;
  side["order"] = "row-major, x slowest";
  std::filesystem::path sidecar = csv_path;
  sidecar.replace_extension(".json");
  std::ofstream js(sidecar);
  if (!js) throw InvalidInput("cannot write " + sidecar.string());
  js << side.dump(2) << '\n';
}

}  // namespace inflex
