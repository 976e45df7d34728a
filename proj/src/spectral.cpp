#include "inflex/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <fftw3.h>

#include "inflex/config.hpp"
#include "inflex/errors.hpp"
#include "inflex/format.hpp"
#include "inflex/random.hpp"

namespace inflex {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kAxisName[] = {"x", "y", "z"};

double sphere_area(int dim) {
  if (dim == 1) return 2.0;
  if (dim == 2) return 2 * kPi;
  return 4 * kPi;
}

// Fixed directions for radial envelopes: axes, diagonals and a seeded sprinkle.
std::vector<Point> probe_directions(int dim, int random_count, bool half_space = false) {
  std::vector<Point> dirs;
  auto push = [&](Point u) {
    double n = 0;
    for (int a = 0; a < dim; ++a) n += u[a] * u[a];
    n = std::sqrt(n);
    for (int a = 0; a < dim; ++a) u[a] /= n;
    if (half_space && u[dim - 1] < 0) return;
    dirs.push_back(u);
  };
  for (int a = 0; a < dim; ++a)
    for (double s : {1.0, -1.0}) {
      Point u{0, 0, 0};
      u[a] = s;
      push(u);
    }
  if (dim > 1)
    for (int mask = 0; mask < (1 << dim); ++mask) {
      Point u{0, 0, 0};
      for (int a = 0; a < dim; ++a) u[a] = (mask & (1 << a)) ? -1.0 : 1.0;
      push(u);
    }
  if (dim > 1) {
    std::mt19937_64 rng(0x5eed);
    for (int i = 0; i < random_count; ++i) {
      Point u{0, 0, 0};
      for (int a = 0; a < dim; ++a) u[a] = normal(rng);
      push(u);
    }
  }
  return dirs;
}

// Panels on one segment that does not straddle the origin.
void segment_panels(double lo, double hi, double feature, bool graded, double osc, std::vector<Panel>& out) {
  if (!(hi > lo)) return;
  // twice the feature scale keeps 16 nodes per panel well inside double precision for the builtin models
  auto cap = [&](double x) { return std::min(osc, 2 * feature * (graded ? std::max(1.0, 0.5 * std::abs(x)) : 1.0)); };
  if (!graded) {
    const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / cap(0) - 1e-9)));
    for (int p = 0; p < count; ++p)
      out.push_back({lo + (hi - lo) * p / count, p + 1 == count ? hi : lo + (hi - lo) * (p + 1) / count});
    return;
  }
  // march away from the origin so each panel uses the cap at its inner end
  std::vector<double> cuts;
  if (lo >= 0) {
    for (double x = lo; x < hi;) {
      cuts.push_back(x);
      x += cap(x);
    }
    cuts.push_back(hi);
  } else {
    for (double x = hi; x > lo;) {
      cuts.push_back(x);
      x -= cap(x);
    }
    cuts.push_back(lo);
    std::reverse(cuts.begin(), cuts.end());
  }
  // a sliver at the far end joins its neighbour
  if (cuts.size() > 2) {
    const std::size_t last = lo >= 0 ? cuts.size() - 2 : 1;
    const double sliver = lo >= 0 ? cuts.back() - cuts[last] : cuts[last] - cuts.front();
    const double prev = lo >= 0 ? cuts[last] - cuts[last - 1] : cuts[last + 1] - cuts[last];
    if (sliver < 0.25 * prev) cuts.erase(cuts.begin() + static_cast<std::ptrdiff_t>(last));
  }
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.push_back({cuts[i], cuts[i + 1]});
}

std::vector<Panel> build_panels(const std::vector<double>& bps, double feature, bool graded, double osc) {
  std::vector<Panel> panels;
  for (std::size_t s = 0; s + 1 < bps.size(); ++s) {
    const double lo = bps[s], hi = bps[s + 1];
    if (lo < 0 && hi > 0) {
      segment_panels(lo, 0.0, feature, graded, osc, panels);
      segment_panels(0.0, hi, feature, graded, osc, panels);
    } else {
      segment_panels(lo, hi, feature, graded, osc, panels);
    }
  }
  return panels;
}

AxisRule rule_on(const std::vector<Panel>& panels, int order) {
  AxisRule rule;
  if (panels.empty()) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  const GaussRule& g = gauss_legendre(order);
  for (const Panel& p : panels) rule.append_panel(p.lo, p.hi, g);
  return rule;
}

std::vector<Complex> phases(const AxisRule& axis, double k, double sign) {
  std::vector<Complex> out(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) out[i] = std::polar(1.0, sign * k * axis.nodes[i]);
  return out;
}

// T[a][b][c] = Σ_{i,j,l} V[i][j][l] p1[a][i] p2[b][j] p3[c][l], staged one axis at a time.
template <class V>
std::vector<Complex> tensor_contract(const std::vector<V>& values, const std::array<std::size_t, 3>& n,
                                     const std::array<std::vector<std::vector<Complex>>, 3>& ph) {
  const std::size_t K1 = ph[0].size(), K2 = ph[1].size(), K3 = ph[2].size();
  std::vector<Complex> A(K1 * n[1] * n[2], Complex(0, 0));
  const std::size_t plane = n[1] * n[2];
  for (std::size_t a = 0; a < K1; ++a) {
    Complex* dst = A.data() + a * plane;
    for (std::size_t i = 0; i < n[0]; ++i) {
      const Complex p = ph[0][a][i];
      const V* src = values.data() + i * plane;
      for (std::size_t r = 0; r < plane; ++r) dst[r] += p * src[r];
    }
  }
  std::vector<Complex> B(K1 * K2 * n[2], Complex(0, 0));
  for (std::size_t a = 0; a < K1; ++a)
    for (std::size_t b = 0; b < K2; ++b) {
      Complex* dst = B.data() + (a * K2 + b) * n[2];
      for (std::size_t j = 0; j < n[1]; ++j) {
        const Complex p = ph[1][b][j];
        const Complex* src = A.data() + (a * n[1] + j) * n[2];
        for (std::size_t l = 0; l < n[2]; ++l) dst[l] += p * src[l];
      }
    }
  A.clear();
  A.shrink_to_fit();
  std::vector<Complex> C(K1 * K2 * K3, Complex(0, 0));
  for (std::size_t ab = 0; ab < K1 * K2; ++ab) {
    const Complex* src = B.data() + ab * n[2];
    for (std::size_t c = 0; c < K3; ++c) {
      Complex acc(0, 0);
      for (std::size_t l = 0; l < n[2]; ++l) acc += ph[2][c][l] * src[l];
      C[ab * K3 + c] = acc;
    }
  }
  return C;
}

std::vector<double> symmetric_breaks(std::initializer_list<double> radii) {
  std::vector<double> b;
  for (double r : radii) {
    b.push_back(-r);
    b.push_back(r);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// Grows R by 1.5 until the tail is below rel times a mass scale (the estimate's own mass when scale < 0).
double truncation_radius(const std::function<double(const Point&)>& g, int dim, double start, double rel,
                         double scale, TailEstimate& est) {
  double R = start;
  while (R <= 1e4) {
    est = radial_tail(g, dim, R);
    const double target = rel * (scale < 0 ? est.mass : scale);
    if (est.tail <= target) return R;
    R *= 1.5;
  }
  throw AccuracyFailure("truncation tail stays above the requested fraction out to radius 1e4");
}

}  // namespace

Spherical to_spherical(const WaveVector& k) {
  Spherical s;
  s.r = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  s.theta = s.r > 0 ? std::acos(std::clamp(k[2] / s.r, -1.0, 1.0)) : 0.0;
  s.phi = std::atan2(k[1], k[0]);
  if (s.phi <= -kPi) s.phi += 2 * kPi;
  return s;
}

WaveVector from_spherical(const Spherical& s) {
  return {s.r * std::sin(s.theta) * std::cos(s.phi), s.r * std::sin(s.theta) * std::sin(s.phi),
          s.r * std::cos(s.theta)};
}

double norm(const WaveVector& k, int dim) {
  double s = 0;
  for (int a = 0; a < dim; ++a) s += k[a] * k[a];
  return std::sqrt(s);
}

double transform_normalization(int dim) { return std::pow(2 * kPi, -0.5 * dim); }

TailEstimate radial_tail(const std::function<double(const Point&)>& g, int dim, double radius) {
  const auto dirs = probe_directions(dim, 24);
  auto envelope = [&](double r) {
    double m = 0;
    for (const auto& u : dirs) m = std::max(m, std::abs(g({r * u[0], r * u[1], r * u[2]})));
    return m;
  };
  TailEstimate est;
  est.radius = radius;
  // r = R/s maps (R, ∞) onto (0, 1)
  const GaussRule& rule = gauss_legendre(24);
  for (const auto& [lo, hi] : std::array<std::pair<double, double>, 3>{{{0.0, 0.1}, {0.1, 0.4}, {0.4, 1.0}}}) {
    const double half = (hi - lo) / 2, mid = (hi + lo) / 2;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = mid + half * rule.nodes[q];
      const double r = radius / s;
      est.tail += half * rule.weights[q] * std::pow(r, dim - 1) * envelope(r) * radius / (s * s);
    }
  }
  est.tail *= sphere_area(dim);
  const int panels = std::max(4, static_cast<int>(std::ceil(radius / 0.5)));
  double inner = 0;
  const GaussRule& r8 = gauss_legendre(8);
  for (int p = 0; p < panels; ++p) {
    const double lo = radius * p / panels, hi = radius * (p + 1) / panels;
    const double half = (hi - lo) / 2, mid = (hi + lo) / 2;
    for (std::size_t q = 0; q < r8.nodes.size(); ++q) {
      const double r = mid + half * r8.nodes[q];
      inner += half * r8.weights[q] * std::pow(r, dim - 1) * envelope(r);
    }
  }
  est.mass = inner * sphere_area(dim) + est.tail;
  return est;
}

FourierSource extension_source(const Extension& ext, const MultiIndex& idx) {
  FourierSource src;
  src.dim = ext.dim();
  src.zero = ext.spec().model->is_zero();
  src.f = [&ext, idx](const Point& x) { return ext.eval(x, idx); };
  for (int a = 0; a < ext.dim(); ++a) src.breakpoints[a] = symmetric_breaks({ext.m(), ext.outer()});
  src.feature = std::min(1.0, ext.spec().model->feature_scale());
  src.label = "extension " + ext.spec().model->to_string() + " m=" + shortest(ext.m());
  return src;
}

FourierSource model_source(const ModelPtr& model, const MultiIndex& idx, double tail_tol) {
  FourierSource src;
  src.dim = model->dim();
  src.zero = model->is_zero();
  src.f = [model, idx](const Point& x) { return model->partial(idx, x); };
  src.feature = model->feature_scale();
  src.graded = model->graded();
  src.label = model->to_string();
  double R = std::max(4.0, 4 * src.feature);
  if (!src.zero) {
    TailEstimate est;
    R = truncation_radius(src.f, src.dim, R, tail_tol, -1.0, est);
    src.tail_bound = est.tail;
  }
  for (int a = 0; a < src.dim; ++a) src.breakpoints[a] = {-R, R};
  return src;
}

FourierSource difference_source(const Extension& ext, double tail_tol) {
  const ModelPtr model = ext.spec().model;
  FourierSource src;
  src.dim = ext.dim();
  src.zero = model->is_zero();
  src.f = [&ext, model](const Point& x) { return model->value(x) - ext.eval(x); };
  src.feature = std::min(1.0, model->feature_scale());
  src.graded = model->graded();
  src.label = "difference " + model->to_string() + " m=" + shortest(ext.m());
  double R = ext.outer();
  if (!src.zero) {
    auto f = [model](const Point& x) { return model->value(x); };
    // scale: the model's mass outside the ball of radius m, which the difference carries
    const double mass = radial_tail(f, src.dim, ext.m()).tail;
    TailEstimate est;
    R = truncation_radius(f, src.dim, ext.outer() + 0.5 * src.feature, tail_tol, mass, est);
    src.tail_bound = est.tail;
  }
  for (int a = 0; a < src.dim; ++a) src.breakpoints[a] = symmetric_breaks({ext.m(), ext.outer(), R});
  return src;
}

// ---- TransformPlan ----

TransformPlan::TransformPlan(FourierSource source, double kmax, int order)
    : source_(std::move(source)), kmax_(std::max(kmax, 1.0)) {
  if (source_.dim < 1 || source_.dim > 3) throw InvalidInput("dimension must be 1, 2 or 3");
  if (order < 2 || order + 4 > 128) throw InvalidInput("quadrature order out of range");
  if (source_.zero) return;
  const double osc = 2 * kPi * order / (10.0 * kmax_);
  std::array<std::vector<Panel>, 3> panels;
  for (int a = 0; a < source_.dim; ++a)
    panels[a] = build_panels(source_.breakpoints[a], source_.feature, source_.graded, osc);
  fine_ = make_grid(panels, order + 4);
  coarse_ = make_grid(panels, order);
  for (double v : fine_.values) l1_ += std::abs(v);
}

TransformPlan::Grid TransformPlan::make_grid(const std::array<std::vector<Panel>, 3>& panels, int order) const {
  Grid g;
  for (int a = 0; a < 3; ++a) g.axes[a] = rule_on(panels[a], order);
  const auto& X = g.axes[0];
  const auto& Y = g.axes[1];
  const auto& Z = g.axes[2];
  g.values.resize(X.size() * Y.size() * Z.size());
  std::size_t idx = 0;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < Y.size(); ++j)
      for (std::size_t l = 0; l < Z.size(); ++l) {
        const Point x{X.nodes[i], Y.nodes[j], Z.nodes[l]};
        g.values[idx++] = source_.f(x) * X.weights[i] * Y.weights[j] * Z.weights[l];
      }
  return g;
}

Complex TransformPlan::contract(const Grid& g, const WaveVector& k) const {
  std::array<std::vector<Complex>, 3> ph;
  for (int a = 0; a < 3; ++a) ph[a] = phases(g.axes[a], a < source_.dim ? k[a] : 0.0, -1.0);
  const std::size_t n2 = g.axes[1].size(), n3 = g.axes[2].size();
  Complex total(0, 0);
  for (std::size_t i = 0; i < g.axes[0].size(); ++i) {
    Complex si(0, 0);
    for (std::size_t j = 0; j < n2; ++j) {
      const double* row = g.values.data() + (i * n2 + j) * n3;
      double re = 0, im = 0;
      for (std::size_t l = 0; l < n3; ++l) {
        re += row[l] * ph[2][l].real();
        im += row[l] * ph[2][l].imag();
      }
      si += ph[1][j] * Complex(re, im);
    }
    total += ph[0][i] * si;
  }
  return total;
}

SpectralValue TransformPlan::evaluate(const WaveVector& k) const {
  for (int a = 0; a < source_.dim; ++a)
    if (std::abs(k[a]) > kmax_ * (1 + 1e-12))
      throw AccuracyFailure("wave vector component " + shortest(k[a]) + " beyond plan resolution " +
                            shortest(kmax_));
  SpectralValue out;
  const double c = transform_normalization(source_.dim);
  out.tail_bound = c * source_.tail_bound;
  if (source_.zero) return out;
  const Complex fine = contract(fine_, k);
  const Complex coarse = contract(coarse_, k);
  out.value = c * fine;
  out.error_estimate = c * std::abs(fine - coarse);
  return out;
}

SpectralValue TransformPlan::at(const WaveVector& k) const {
  SpectralValue v = evaluate(k);
  const double c = transform_normalization(source_.dim);
  if (v.error_estimate > 1e-6 * std::abs(v.value) + 1e-10 * c * l1_)
    throw AccuracyFailure("panel refinement disagrees by " + shortest(v.error_estimate) + " at |k|=" +
                          shortest(norm(k, source_.dim)) + " for " + source_.label);
  return v;
}

std::vector<Complex> TransformPlan::on_grid(const std::array<std::vector<double>, 3>& k_axes) const {
  std::array<std::vector<std::vector<Complex>>, 3> ph;
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> ks = a < source_.dim ? k_axes[a] : std::vector<double>{0.0};
    for (double k : ks)
      if (std::abs(k) > kmax_ * (1 + 1e-12)) throw AccuracyFailure("grid frequency beyond plan resolution");
    for (double k : ks) ph[a].push_back(phases(fine_.axes[a], k, -1.0));
    total *= ks.size();
  }
  if (source_.zero) return std::vector<Complex>(total, Complex(0, 0));
  std::vector<Complex> out =
      tensor_contract(fine_.values, {fine_.axes[0].size(), fine_.axes[1].size(), fine_.axes[2].size()}, ph);
  const double c = transform_normalization(source_.dim);
  for (auto& v : out) v *= c;
  return out;
}

SpectralValue ft_point(const FourierSource& source, const WaveVector& k) {
  double kmax = 0;
  for (int a = 0; a < source.dim; ++a) kmax = std::max(kmax, std::abs(k[a]));
  return TransformPlan(source, kmax).at(k);
}

// ---- sampled fields ----

SampledField sample_field(const std::function<double(const Point&)>& f, int dim, const GridSpec& grid) {
  SampledField out;
  out.dim = dim;
  out.grid = grid;
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < dim; ++a) n[a] = grid.counts[a];
  out.values.reserve(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int l = 0; l < n[2]; ++l) {
        Point x{0, 0, 0};
        const std::array<int, 3> id{i, j, l};
        for (int a = 0; a < dim; ++a) x[a] = grid.origin[a] + id[a] * grid.spacing[a];
        out.values.push_back(f(x));
      }
  return out;
}

WaveVector SpectralField::k_at(std::size_t flat) const {
  WaveVector k{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    const std::size_t n = static_cast<std::size_t>(counts[a]);
    k[a] = k_origin[a] + static_cast<double>(flat % n) * k_spacing[a];
    flat /= n;
  }
  return k;
}

SpectralField ft_grid(const SampledField& field) {
  const int dim = field.dim;
  SpectralField out;
  out.dim = dim;
  std::size_t total = 1;
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    n[a] = field.grid.counts[a];
    if (n[a] < 2 || !(field.grid.spacing[a] > 0)) throw InvalidInput("grid needs two points and positive spacing");
    total *= static_cast<std::size_t>(n[a]);
  }
  if (field.values.size() != total) throw InvalidInput("field size does not match grid");
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  for (std::size_t i = 0; i < total; ++i) {
    buf[i][0] = field.values[i];
    buf[i][1] = 0.0;
  }
  fftw_plan plan = fftw_plan_dft(dim, n.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  double scale = transform_normalization(dim);
  for (int a = 0; a < dim; ++a) {
    const double h = field.grid.spacing[a];
    scale *= h;
    out.counts[a] = n[a];
    out.k_spacing[a] = 2 * kPi / (n[a] * h);
    out.k_origin[a] = -(n[a] / 2) * out.k_spacing[a];
  }
  out.values.assign(total, Complex(0, 0));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat, src = 0, stride = 1;
    std::array<std::size_t, 3> id{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      id[a] = rest % static_cast<std::size_t>(n[a]);
      rest /= static_cast<std::size_t>(n[a]);
    }
    double phase = 0;
    for (int a = dim - 1; a >= 0; --a) {
      const long m = static_cast<long>(id[a]) - n[a] / 2;
      const long wrapped = (m % n[a] + n[a]) % n[a];
      src += static_cast<std::size_t>(wrapped) * stride;
      stride *= static_cast<std::size_t>(n[a]);
      phase -= (out.k_origin[a] + id[a] * out.k_spacing[a]) * field.grid.origin[a];
    }
    out.values[flat] = scale * std::polar(1.0, phase) * Complex(buf[src][0], buf[src][1]);
  }
  fftw_free(buf);
  return out;
}

Complex ft_grid_at(const SampledField& field, const WaveVector& k) {
  const int dim = field.dim;
  std::array<std::vector<Complex>, 3> ph;
  double scale = transform_normalization(dim);
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      ph[a] = {Complex(1, 0)};
      continue;
    }
    const double h = field.grid.spacing[a];
    if (std::abs(k[a]) > kPi / h * (1 + 1e-12))
      throw AliasingError("|k_" + std::to_string(a + 1) + "| = " + shortest(std::abs(k[a])) +
                          " exceeds the grid Nyquist limit " + shortest(kPi / h));
    scale *= h;
    for (int i = 0; i < field.grid.counts[a]; ++i)
      ph[a].push_back(std::polar(1.0, -k[a] * (field.grid.origin[a] + i * h)));
  }
  const std::size_t n2 = ph[1].size(), n3 = ph[2].size();
  Complex total(0, 0);
  for (std::size_t i = 0; i < ph[0].size(); ++i) {
    Complex si(0, 0);
    for (std::size_t j = 0; j < n2; ++j) {
      Complex sj(0, 0);
      const double* row = field.values.data() + (i * n2 + j) * n3;
      for (std::size_t l = 0; l < n3; ++l) sj += row[l] * ph[2][l];
      si += ph[1][j] * sj;
    }
    total += ph[0][i] * si;
  }
  return scale * total;
}

void export_spectrum_csv(const SpectralField& spectrum, const std::filesystem::path& csv_path) {
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream out(csv_path);
  if (!out) throw InvalidInput("cannot write " + csv_path.string());
  for (int a = 0; a < spectrum.dim; ++a) out << 'k' << a + 1 << ',';
  out << "re,im\n";
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    const WaveVector k = spectrum.k_at(i);
    for (int a = 0; a < spectrum.dim; ++a) out << shortest(k[a]) << ',';
    out << shortest(spectrum.values[i].real()) << ',' << shortest(spectrum.values[i].imag()) << '\n';
  }
}

// ---- decay ----

DecayFit decay_exponent_fit(const SpectralFn& F, int dim, const WaveVector& direction, double k_lo,
                            double k_hi, int samples, double floor) {
  if (!(k_lo > 0) || !(k_hi > k_lo) || samples < 6) throw InvalidInput("decay fit needs 0 < k_lo < k_hi and 6+ samples");
  DecayFit fit;
  fit.floor = floor;
  const double len = norm(direction, dim);
  if (!(len > 0)) throw InvalidInput("zero ray direction");
  for (int a = 0; a < dim; ++a) {
    fit.direction[a] = direction[a] / len;
    if (std::abs(fit.direction[a]) < 1e-12) throw InvalidInput("ray is not generic: a component vanishes");
  }
  const int window = std::max(1, samples / 8);
  std::vector<double> lx, ly;
  for (int start = 0; start < samples; start += window) {
    double best = -1, best_k = 0;
    for (int s = start; s < std::min(samples, start + window); ++s) {
      const double k = k_lo * std::pow(k_hi / k_lo, static_cast<double>(s) / (samples - 1));
      WaveVector kv{0, 0, 0};
      for (int a = 0; a < dim; ++a) kv[a] = k * fit.direction[a];
      const double v = std::abs(F(kv));
      if (v > best) {
        best = v;
        best_k = k;
      }
    }
    if (best > 10 * floor) {
      lx.push_back(std::log(best_k));
      ly.push_back(std::log(best));
    }
  }
  fit.used = static_cast<int>(lx.size());
  if (lx.size() < 3) {
    fit.rejected = true;
    fit.note = "values at quadrature floor " + shortest(floor);
    return fit;
  }
  const LineFit line = fit_line(lx, ly);
  fit.exponent = line.slope;
  fit.constant = std::exp(line.intercept);
  fit.residual = line.residual;
  return fit;
}

DecayFit decay_exponent_fit(const FourierSource& source, const WaveVector& direction, double k_lo,
                            double k_hi, int samples) {
  const double len = norm(direction, source.dim);
  double comp = 0;
  for (int a = 0; a < source.dim; ++a) comp = std::max(comp, std::abs(direction[a]) / (len > 0 ? len : 1));
  const TransformPlan plan(source, k_hi * comp);
  const double floor = 1e-13 * transform_normalization(source.dim) * plan.l1();
  return decay_exponent_fit([&](const WaveVector& k) { return plan.at(k).value; }, source.dim, direction,
                            k_lo, k_hi, samples, floor);
}

std::vector<WaveVector> generic_k_samples(int dim, int count, double lo, double hi, unsigned long long seed,
                                          double min_component) {
  if (!(lo > 0) || hi < lo || count < 0) throw InvalidInput("bad |k| range for samples");
  if (min_component * std::sqrt(static_cast<double>(dim)) > hi)
    throw InvalidInput("no wave vector in range clears the axis slabs");
  std::mt19937_64 rng(seed);
  std::vector<WaveVector> out;
  while (static_cast<int>(out.size()) < count) {
    WaveVector u{0, 0, 0};
    for (int a = 0; a < dim; ++a) u[a] = normal(rng);
    const double len = norm(u, dim);
    if (!(len > 0)) continue;
    const double r = lo * std::pow(hi / lo, uniform01(rng));
    bool ok = true;
    for (int a = 0; a < dim; ++a) {
      u[a] *= r / len;
      ok = ok && std::abs(u[a]) >= min_component;
    }
    if (ok) out.push_back(u);
  }
  return out;
}

VerificationReport decay_bound_check(const std::vector<std::pair<double, SpectralFn>>& schedule, int dim,
                                     int n, std::span<const WaveVector> ks) {
  if (schedule.empty() || ks.empty()) throw InvalidInput("decay check needs an m schedule and k samples");
  for (const auto& k : ks)
    if (!(norm(k, dim) > 1)) throw InvalidInput("decay samples need |k| > 1");
  VerificationReport rep;
  rep.name = "decay_bound";
  auto ratios = [&](const std::pair<double, SpectralFn>& entry) {
    std::vector<double> r;
    for (const auto& k : ks)
      r.push_back(std::abs(entry.second(k)) * std::pow(norm(k, dim), n) / std::pow(entry.first, dim));
    return r;
  };
  const std::vector<double> first = ratios(schedule.front());
  const double D = *std::max_element(first.begin(), first.end());
  rep.details["D"] = D;
  rep.details["exponent"] = n;
  rep.details["calibration"] = "all samples at m=" + shortest(schedule.front().first);
  Json per_m = Json::array();
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const std::vector<double> r = s == 0 ? first : ratios(schedule[s]);
    const double worst = *std::max_element(r.begin(), r.end());
    rep.add_upper("m=" + shortest(schedule[s].first) + ": max |F| |k|^" + std::to_string(n) + " / m^" +
                      std::to_string(dim),
                  worst, D, 1e-9 * D);
    per_m.push_back({{"m", schedule[s].first}, {"max_ratio", worst}});
  }
  rep.details["per_m"] = per_m;
  return rep;
}

VerificationReport decay_bound_check(const ExtensionSpec& base, std::span<const double> m_schedule,
                                     std::span<const WaveVector> ks) {
  double kmax = 0;
  for (const auto& k : ks)
    for (int a = 0; a < base.dim; ++a) kmax = std::max(kmax, std::abs(k[a]));
  std::vector<std::pair<double, SpectralFn>> schedule;
  for (double m : m_schedule) {
    ExtensionSpec spec = base;
    spec.m = m;
    auto ext = std::make_shared<Extension>(spec);
    auto plan = std::make_shared<TransformPlan>(extension_source(*ext), kmax);
    schedule.emplace_back(m, [ext, plan](const WaveVector& k) { return plan->at(k).value; });
  }
  VerificationReport rep = decay_bound_check(schedule, base.dim, base.order_n, ks);
  rep.details["model"] = base.model->to_string();
  return rep;
}

// ---- alpha ----

double alpha(int p, double theta, double phi) {
  const double s = std::abs(std::sin(theta)), c = std::abs(std::cos(theta));
  return std::pow(s, p) * (std::pow(std::abs(std::cos(phi)), p) + std::pow(std::abs(std::sin(phi)), p)) +
         std::pow(c, p);
}

AlphaMin alpha_min(int p) {
  if (p < 2 || p % 2 != 0) throw InvalidInput("alpha needs an even exponent p >= 2");
  constexpr int nt = 361, np = 720;
  std::vector<AlphaMin> cand;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double th = kPi * i / (nt - 1);
      const double ph = -kPi + 2 * kPi * (j + 1) / np;
      cand.push_back({alpha(p, th, ph), th, ph});
    }
  std::partial_sort(cand.begin(), cand.begin() + 8, cand.end(),
                    [](const AlphaMin& a, const AlphaMin& b) { return a.value < b.value; });
  AlphaMin best = cand.front();
  const double step = 2 * kPi / np;
  for (int c = 0; c < 8; ++c) {
    AlphaMin cur = cand[c];
    for (int round = 0; round < 40; ++round) {
      const double before = cur.value;
      auto rt = boost::math::tools::brent_find_minima([&](double t) { return alpha(p, t, cur.phi); },
                                                      cur.theta - step, cur.theta + step, 52);
      cur.theta = rt.first;
      auto rp = boost::math::tools::brent_find_minima([&](double f) { return alpha(p, cur.theta, f); },
                                                      cur.phi - step, cur.phi + step, 52);
      cur.phi = rp.first;
      cur.value = rp.second;
      if (before - cur.value <= 1e-17) break;
    }
    if (cur.value < best.value) best = cur;
  }
  best.theta = std::clamp(best.theta, 0.0, kPi);
  if (best.phi <= -kPi) best.phi += 2 * kPi;
  if (best.phi > kPi) best.phi -= 2 * kPi;
  return best;
}

// ---- identities and convergence ----

VerificationReport verify_ratio_identities(const ModelPtr& model, std::span<const WaveVector> ks, double k0) {
  const int dim = model->dim();
  double kmax = 0;
  for (const auto& k : ks)
    for (int a = 0; a < dim; ++a) {
      if (std::abs(k[a]) < k0)
        throw InvalidInput("wave vector component " + shortest(k[a]) + " inside the axis slab |k| < " + shortest(k0));
      kmax = std::max(kmax, std::abs(k[a]));
    }
  VerificationReport rep;
  rep.name = "ratio_identities";
  rep.details["model"] = model->to_string();
  std::vector<Complex> F0;
  double tail = 0;
  {
    const TransformPlan base(model_source(model), kmax);
    for (const auto& k : ks) F0.push_back(base.at(k).value);
    tail = base.source().tail_bound;
  }
  rep.details["truncation_tail"] = tail;
  double worst = 0;
  for (int i = 0; i < dim; ++i) {
    MultiIndex e{0, 0, 0};
    e[i] = 1;
    const TransformPlan part(model_source(model, e), kmax);
    for (std::size_t s = 0; s < ks.size(); ++s) {
      const double res = std::abs(part.at(ks[s]).value - Complex(0, ks[s][i]) * F0[s]);
      worst = std::max(worst, res);
      rep.add_upper("k" + std::to_string(s) + ": |F(d/d" + kAxisName[i] + " f) - i k_" + std::to_string(i + 1) +
                        " F(f)|",
                    res, kDefaultTolerances.ratio_identity);
    }
  }
  for (std::size_t s = 0; s < ks.size(); ++s) {
    const WaveVector& k = ks[s];
    int imax = 0;
    for (int i = 1; i < dim; ++i)
      if (std::abs(k[i]) > std::abs(k[imax])) imax = i;
    rep.add_upper("k" + std::to_string(s) + ": |k| / max|k_i|", norm(k, dim) / std::abs(k[imax]),
                  std::sqrt(static_cast<double>(dim)), 1e-12);
  }
  rep.details["max_residual"] = worst;
  return rep;
}

std::vector<WaveVector> axis_avoiding_region(int dim, std::span<const double> magnitudes) {
  std::vector<double> vals;
  for (double v : magnitudes) {
    vals.push_back(-std::abs(v));
    vals.push_back(std::abs(v));
  }
  std::vector<WaveVector> out{{0, 0, 0}};
  for (int a = 0; a < dim; ++a) {
    std::vector<WaveVector> next;
    for (const auto& k : out)
      for (double v : vals) {
        WaveVector n = k;
        n[a] = v;
        next.push_back(n);
      }
    out = std::move(next);
  }
  return out;
}

VerificationReport ft_convergence(const ExtensionSpec& base, std::span<const double> m_schedule,
                                  std::span<const WaveVector> region) {
  if (m_schedule.size() < 2) throw InvalidInput("a convergence fit needs at least two m values");
  if (region.empty()) throw InvalidInput("empty k region");
  double kmax = 0;
  for (const auto& k : region)
    for (int a = 0; a < base.dim; ++a) {
      if (std::abs(k[a]) < kDefaultTolerances.axis_slab)
        throw InvalidInput("k region enters the axis slab |k_i| < " + shortest(kDefaultTolerances.axis_slab));
      kmax = std::max(kmax, std::abs(k[a]));
    }
  VerificationReport rep;
  rep.name = "ft_convergence";
  rep.details["model"] = base.model->to_string();
  std::vector<double> lm, ls;
  Json per_m = Json::array();
  bool all_zero = true;
  for (double m : m_schedule) {
    ExtensionSpec spec = base;
    spec.m = m;
    const Extension ext(spec);
    const TransformPlan plan(difference_source(ext), kmax);
    double sup = 0;
    for (const auto& k : region) sup = std::max(sup, std::abs(plan.at(k).value));
    all_zero = all_zero && sup == 0;
    lm.push_back(std::log(m));
    ls.push_back(std::log(std::max(sup, std::numeric_limits<double>::min())));
    per_m.push_back({{"m", m}, {"sup", sup}, {"tail_bound", transform_normalization(base.dim) * plan.source().tail_bound}});
  }
  rep.details["per_m"] = per_m;
  const double slope = all_zero ? -std::numeric_limits<double>::infinity() : fit_line(lm, ls).slope;
  rep.add_upper("fitted log-log slope of sup |F(f) - F(f_m)|", slope, kDefaultTolerances.convergence_slope, 0.0,
                all_zero ? "identically zero" : "");
  return rep;
}

// ---- inversion ----

SpectralSource spectral_of(const TransformPlan& plan) {
  SpectralSource g;
  g.dim = plan.dim();
  g.value = [&plan](const WaveVector& k) { return plan.at(k).value; };
  g.batch = [&plan](const std::array<std::vector<double>, 3>& axes) { return plan.on_grid(axes); };
  double s = 0;
  for (int a = 0; a < plan.dim(); ++a)
    for (double b : plan.source().breakpoints[a]) s = std::max(s, std::abs(b));
  g.support = s;
  return g;
}

L1Tail l1_tail(double constant, double exponent, int dim, double R) {
  L1Tail t;
  if (exponent >= -dim) {
    t.divergent = true;
    t.value = std::numeric_limits<double>::infinity();
    return t;
  }
  if (constant == 0) return t;
  t.value = std::exp(std::log(std::abs(constant)) + (dim + exponent) * std::log(R)) * sphere_area(dim) /
            -(dim + exponent);
  return t;
}

PowerTail spectral_tail(const SpectralFn& g, int dim, double R, double shell) {
  PowerTail out;
  const auto dirs = probe_directions(dim, 6, true);
  constexpr int radii = 10;
  std::vector<double> env(radii, 0.0), rs(radii);
  for (int i = 0; i < radii; ++i) {
    rs[i] = R * std::pow(shell, static_cast<double>(i) / (radii - 1));
    for (const auto& u : dirs) env[i] = std::max(env[i], std::abs(g({rs[i] * u[0], rs[i] * u[1], rs[i] * u[2]})));
  }
  // upper envelope from the outside in
  for (int i = radii - 2; i >= 0; --i) env[i] = std::max(env[i], env[i + 1]);
  std::vector<double> lx, ly;
  for (int i = 0; i < radii; ++i)
    if (env[i] > 0) {
      lx.push_back(std::log(rs[i]));
      ly.push_back(std::log(env[i]));
    }
  if (lx.size() < 2) {
    out.exponent = -std::numeric_limits<double>::infinity();
    if (env[0] > 0) {
      // decays past underflow inside the shell: bound by the first value over one shell width
      out.tail = env[0] * sphere_area(dim) * std::pow(R * shell, dim) / dim;
    }
    return out;
  }
  // the shallowest slope from the first radius keeps the power law above every shell sample
  double slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < lx.size(); ++i) slope = std::max(slope, (ly[i] - ly[0]) / (lx[i] - lx[0]));
  out.exponent = slope;
  const double log_c = ly[0] - slope * lx[0];
  out.constant = std::exp(log_c);
  L1Tail t;
  if (slope >= -dim) {
    t = l1_tail(1.0, slope, dim, R);
  } else {
    const double d = dim + slope;
    t.value = std::exp(log_c + d * std::log(R)) * sphere_area(dim) / -d;
  }
  out.tail = t.value;
  out.divergent = t.divergent;
  return out;
}

std::vector<InverseResult> inverse_at_points(const SpectralSource& g, std::span<const Point> xs, double R,
                                             double tol, double shell) {
  if (!(R > 0)) throw InvalidInput("inversion radius must be positive");
  const int dim = g.dim;
  double xmax = 0;
  for (const auto& x : xs)
    for (int a = 0; a < dim; ++a) xmax = std::max(xmax, std::abs(x[a]));
  const double width = std::min(2.0, 2 * kPi * 16 / (10.0 * (g.support + xmax)));
  const int panels = std::max(2, static_cast<int>(std::ceil(2 * R / width)));

  auto integrate = [&](int order) {
    const AxisRule rule = uniform_panels(-R, R, panels, order);
    std::array<std::vector<double>, 3> axes;
    std::array<std::size_t, 3> n{1, 1, 1};
    for (int a = 0; a < 3; ++a) {
      axes[a] = a < dim ? rule.nodes : std::vector<double>{0.0};
      n[a] = axes[a].size();
    }
    std::vector<Complex> G;
    if (g.batch) {
      G = g.batch(axes);
    } else {
      G.reserve(n[0] * n[1] * n[2]);
      for (double k1 : axes[0])
        for (double k2 : axes[1])
          for (double k3 : axes[2]) G.push_back(g.value({k1, k2, k3}));
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n[0]; ++i)
      for (std::size_t j = 0; j < n[1]; ++j)
        for (std::size_t l = 0; l < n[2]; ++l)
          G[idx++] *= (dim > 0 ? rule.weights[i] : 1.0) * (dim > 1 ? rule.weights[j] : 1.0) *
                      (dim > 2 ? rule.weights[l] : 1.0);
    std::vector<Complex> vals;
    for (const auto& x : xs) {
      std::array<std::vector<std::vector<Complex>>, 3> ph;
      for (int a = 0; a < 3; ++a) {
        AxisRule ax;
        ax.nodes = axes[a];
        ph[a] = {phases(ax, a < dim ? x[a] : 0.0, 1.0)};
      }
      vals.push_back(transform_normalization(dim) * tensor_contract(G, n, ph)[0]);
    }
    return vals;
  };
  const std::vector<Complex> fine = integrate(20);
  const std::vector<Complex> coarse = integrate(16);
  const PowerTail tail = spectral_tail(g.value, dim, R, shell);
  const double tail_bound = tail.divergent ? std::numeric_limits<double>::infinity()
                                           : transform_normalization(dim) * tail.tail;
  if (tail_bound > tol)
    throw AccuracyFailure("spectral tail beyond R=" + shortest(R) + " is " + shortest(tail_bound) +
                          ", above the tolerance " + shortest(tol));
  std::vector<InverseResult> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    InverseResult r;
    r.value = fine[i].real();
    r.imag = fine[i].imag();
    r.quadrature_estimate = std::abs(fine[i] - coarse[i]);
    r.tail_bound = tail_bound;
    r.tail_exponent = tail.exponent;
    out.push_back(r);
  }
  return out;
}

InverseResult inverse_at_point(const SpectralSource& g, const Point& x, double R, double tol, double shell) {
  const std::array<Point, 1> xs{x};
  return inverse_at_points(g, xs, R, tol, shell).front();
}

VerificationReport inversion_error(const ExtensionSpec& base, std::span<const double> m_schedule,
                                   std::span<const Point> xs, double R, std::optional<double> final_bound) {
  if (m_schedule.empty() || xs.empty()) throw InvalidInput("inversion needs m values and sample points");
  const int dim = base.dim;
  const double shell = dim == 3 ? 2.0 : 4.0;
  VerificationReport rep;
  rep.name = "inversion_error";
  rep.details["model"] = base.model->to_string();
  Json per_m = Json::array();
  std::vector<double> errors;
  for (double m : m_schedule) {
    ExtensionSpec spec = base;
    spec.m = m;
    const Extension ext(spec);
    const FourierSource src = extension_source(ext);
    double radius = R > 0 ? R : (dim == 1 ? 8.0 : 6.0);
    std::vector<InverseResult> res;
    while (true) {
      const TransformPlan grid_plan(src, radius);
      const TransformPlan tail_plan(src, shell * radius);
      SpectralSource g = spectral_of(grid_plan);
      g.value = [&tail_plan](const WaveVector& k) { return tail_plan.at(k).value; };
      res = inverse_at_points(g, xs, radius, std::numeric_limits<double>::infinity(), shell);
      const bool grow = R <= 0 && dim == 1 && res.front().tail_bound > 1e-7 && radius < 300;
      if (!grow) break;
      radius *= 1.5;
    }
    double err = 0, quad = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      err = std::max(err, std::abs(base.model->value(xs[i]) - res[i].value));
      quad = std::max(quad, res[i].quadrature_estimate);
    }
    errors.push_back(err);
    per_m.push_back({{"m", m},
                     {"R", radius},
                     {"max_error", err},
                     {"quadrature_estimate", quad},
                     {"tail_bound", res.front().tail_bound},
                     {"tail_exponent", res.front().tail_exponent}});
  }
  rep.details["per_m"] = per_m;
  for (std::size_t i = 1; i < errors.size(); ++i)
    rep.add_upper("m=" + shortest(m_schedule[i]) + ": max error not above m=" + shortest(m_schedule[i - 1]),
                  errors[i], errors[i - 1]);
  if (final_bound)
    rep.add_upper("final max error", errors.back(), *final_bound);
  else
    rep.add("final max error", errors.back(), std::numeric_limits<double>::infinity(), 0.0,
            std::isfinite(errors.back()), "reported");
  return rep;
}

bool generic_direction(double theta, double phi, int dim) {
  const WaveVector u = from_spherical({1.0, theta, phi});
  if (dim == 1) return true;
  if (dim == 2) return std::abs(std::cos(phi)) > 1e-12 && std::abs(std::sin(phi)) > 1e-12;
  for (int a = 0; a < 3; ++a)
    if (std::abs(u[a]) <= 1e-12) return false;
  return true;
}

VerificationReport radial_limit_check(const ModelPtr& model, double theta, double phi,
                                      std::span<const double> radii, double tol) {
  const int dim = model->dim();
  if (radii.empty()) throw InvalidInput("empty radius schedule");
  if (!generic_direction(theta, phi, dim)) throw InvalidInput("direction is not generic: a direction cosine vanishes");
  WaveVector u{1, 0, 0};
  if (dim == 2) u = {std::cos(phi), std::sin(phi), 0};
  if (dim == 3) u = from_spherical({1.0, theta, phi});
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const TransformPlan plan(model_source(model), rmax);
  VerificationReport rep;
  rep.name = "radial_limit";
  rep.details["model"] = model->to_string();
  Json vals = Json::array();
  double prev = std::numeric_limits<double>::infinity();
  double last = 0;
  for (double r : radii) {
    const double v = r * std::abs(plan.at({r * u[0], r * u[1], r * u[2]}).value);
    vals.push_back({{"r", r}, {"r_abs_F", v}});
    if (std::isfinite(prev)) rep.add_upper("r=" + shortest(r) + ": |r F| non-increasing", v, prev, 1e-12 * prev);
    prev = v;
    last = v;
  }
  rep.details["values"] = vals;
  rep.add_upper("final |r F|", last, tol);
  return rep;
}

VerificationReport weighted_ball_integrals(const ModelPtr& model, double R) {
  const int dim = model->dim();
  VerificationReport rep;
  rep.name = "weighted_ball_integrals";
  rep.details["model"] = model->to_string();
  rep.details["R"] = R;
  const GaussRule& gr = gauss_legendre(16);
  const int rp = std::max(1, static_cast<int>(std::ceil(R)));
  auto ball = [&](const TransformPlan& plan, int weight) {
    double total = 0;
    for (int p = 0; p < rp; ++p) {
      const double lo = R * p / rp, hi = R * (p + 1) / rp;
      for (std::size_t q = 0; q < gr.nodes.size(); ++q) {
        const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gr.nodes[q];
        const double wr = 0.5 * (hi - lo) * gr.weights[q] * std::pow(r, dim - 1 - weight);
        double shell = 0;
        if (dim == 1) {
          shell = std::abs(plan.at({r, 0, 0}).value) + std::abs(plan.at({-r, 0, 0}).value);
        } else if (dim == 2) {
          constexpr int nphi = 64;
          for (int j = 0; j < nphi; ++j) {
            const double ph = 2 * kPi * j / nphi;
            shell += 2 * kPi / nphi * std::abs(plan.at({r * std::cos(ph), r * std::sin(ph), 0}).value);
          }
        } else {
          constexpr int nphi = 32;
          for (std::size_t t = 0; t < gr.nodes.size(); ++t) {
            const double th = 0.5 * kPi * (1 + gr.nodes[t]);
            for (int j = 0; j < nphi; ++j) {
              const double ph = 2 * kPi * j / nphi;
              shell += 0.5 * kPi * gr.weights[t] * std::sin(th) * 2 * kPi / nphi *
                       std::abs(plan.at(from_spherical({r, th, ph})).value);
            }
          }
        }
        total += wr * shell;
      }
    }
    return total;
  };
  for (int i = 0; i < dim; ++i) {
    MultiIndex e{0, 0, 0};
    e[i] = 1;
    const double v = ball(TransformPlan(model_source(model, e), R), 1);
    rep.add_upper(std::string("|F(d/d") + kAxisName[i] + " f)| / |k| over the ball", v,
                  std::numeric_limits<double>::max());
    for (int j = i; j < dim; ++j) {
      MultiIndex e2 = e;
      e2[j] += 1;
      const double v2 = ball(TransformPlan(model_source(model, e2), R), 2);
      rep.add_upper(std::string("|F(d2/d") + kAxisName[i] + "d" + kAxisName[j] + " f)| / |k|^2 over the ball", v2,
                    std::numeric_limits<double>::max());
    }
  }
  return rep;
}

}  // namespace inflex
