#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inflex/extender.hpp"
#include "inflex/models.hpp"
#include "inflex/quadrature.hpp"
#include "inflex/report.hpp"

namespace inflex {

using Complex = std::complex<double>;
using WaveVector = std::array<double, 3>;

struct Spherical {
  double r = 0.0;
  double theta = 0.0;  // polar angle from the k3 axis
  double phi = 0.0;    // azimuth in (-pi, pi]
};

Spherical to_spherical(const WaveVector& k);
WaveVector from_spherical(const Spherical& s);
double norm(const WaveVector& k, int dim);

/// (2π)^{-dim/2}
double transform_normalization(int dim);

/// A real integrand on a box, ready for oscillatory quadrature.
struct FourierSource {
  int dim = 1;
  std::function<double(const Point&)> f;
  /// Per-axis sorted breakpoints; the first and last bound the integration box.
  std::array<std::vector<double>, 3> breakpoints;
  double feature = 1.0;  // panel width cap where the integrand is smooth
  bool graded = false;   // cap grows like |x|/2 away from the origin
  double tail_bound = 0.0;  // bound on ∫|f| outside the box
  bool zero = false;
  std::string label;
};

/// f_m (or one of its partials) over C_{m+w}, with breakpoints on every seam.
FourierSource extension_source(const Extension& ext, const MultiIndex& idx = {0, 0, 0});

/// A model partial truncated at a radius where the estimated tail drops below tail_tol · ∫|f|.
FourierSource model_source(const ModelPtr& model, const MultiIndex& idx = {0, 0, 0},
                           double tail_tol = 1e-10);

/// f - f_m, which vanishes on C_m; the model part is truncated as in model_source.
FourierSource difference_source(const Extension& ext, double tail_tol = 1e-10);

struct TailEstimate {
  double radius = 0.0;
  double tail = 0.0;
  double mass = 0.0;  // estimate of ∫|f| over R^dim
};

/// Radial-envelope tail of |g| outside the ball of radius `radius`.
TailEstimate radial_tail(const std::function<double(const Point&)>& g, int dim, double radius);

struct SpectralValue {
  Complex value;
  double error_estimate = 0.0;  // |fine - coarse| on the same panels
  double tail_bound = 0.0;      // normalized truncation tail
};

/// Cached tensor Gauss–Legendre grids resolving every |k_a| <= kmax. Panels hold `order` nodes
/// per 1.6 periods at kmax; the fine rule uses order + 4 nodes on the same panels.
class TransformPlan {
 public:
  TransformPlan(FourierSource source, double kmax, int order = 16);

  int dim() const { return source_.dim; }
  double kmax() const { return kmax_; }
  const FourierSource& source() const { return source_; }
  /// ∫|f| over the box, from the fine rule.
  double l1() const { return l1_; }
  std::size_t nodes() const { return fine_.values.size(); }

  /// Throws AccuracyFailure when the panel-refinement estimate is too large.
  SpectralValue at(const WaveVector& k) const;
  /// Same as at() without the accuracy gate.
  SpectralValue evaluate(const WaveVector& k) const;
  /// Values on the tensor grid k_axes[0] × k_axes[1] × k_axes[2] (x slowest), fine rule.
  std::vector<Complex> on_grid(const std::array<std::vector<double>, 3>& k_axes) const;

 private:
  struct Grid {
    std::array<AxisRule, 3> axes;
    std::vector<double> values;  // f times tensor weights, x slowest
  };
  Grid make_grid(const std::array<std::vector<Panel>, 3>& panels, int order) const;
  Complex contract(const Grid& g, const WaveVector& k) const;

  FourierSource source_;
  double kmax_;
  Grid fine_;
  Grid coarse_;
  double l1_ = 0.0;
};

SpectralValue ft_point(const FourierSource& source, const WaveVector& k);

// ---- sampled fields and FFT ----

struct SampledField {
  int dim = 1;
  GridSpec grid;
  std::vector<double> values;  // row-major, x slowest
};

SampledField sample_field(const std::function<double(const Point&)>& f, int dim, const GridSpec& grid);

struct SpectralField {
  int dim = 1;
  std::array<int, 3> counts{1, 1, 1};
  std::array<double, 3> k_origin{0, 0, 0};
  std::array<double, 3> k_spacing{0, 0, 0};
  std::vector<Complex> values;  // ascending k per axis, k1 slowest
  WaveVector k_at(std::size_t flat) const;
};

/// Riemann-sum transform on the grid's own frequencies, computed with FFTW.
SpectralField ft_grid(const SampledField& field);
/// The same Riemann sum at an arbitrary k; AliasingError past the Nyquist limit π/h.
Complex ft_grid_at(const SampledField& field, const WaveVector& k);

void export_spectrum_csv(const SpectralField& spectrum, const std::filesystem::path& csv_path);

// ---- decay ----

struct DecayFit {
  WaveVector direction{0, 0, 0};
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;
  double floor = 0.0;
  int used = 0;
  bool rejected = false;
  std::string note;
};

using SpectralFn = std::function<Complex(const WaveVector&)>;

/// Log–log fit of the envelope of |F| along a ray (window maxima over log-spaced samples).
DecayFit decay_exponent_fit(const SpectralFn& F, int dim, const WaveVector& direction, double k_lo,
                            double k_hi, int samples, double floor);
DecayFit decay_exponent_fit(const FourierSource& source, const WaveVector& direction, double k_lo,
                            double k_hi, int samples = 48);

/// Seeded wave vectors with lo <= |k| <= hi and every |k_a| >= min_component.
std::vector<WaveVector> generic_k_samples(int dim, int count, double lo, double hi, unsigned long long seed,
                                          double min_component = 0.25);

/// D fitted over all samples at the smallest m; |F| |k|^n <= D m^dim then checked at every m.
VerificationReport decay_bound_check(const std::vector<std::pair<double, SpectralFn>>& schedule, int dim,
                                     int n, std::span<const WaveVector> ks);
/// Extension schedule of one model, transformed by ft_point.
VerificationReport decay_bound_check(const ExtensionSpec& base, std::span<const double> m_schedule,
                                     std::span<const WaveVector> ks);

/// min over the sphere of sin^p θ (cos^p φ + sin^p φ) + cos^p θ.
struct AlphaMin {
  double value = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};
AlphaMin alpha_min(int p);
double alpha(int p, double theta, double phi);

/// |F(∂f/∂x_i)(k) - i k_i F(f)(k)| at each sample, plus the max-component bound.
VerificationReport verify_ratio_identities(const ModelPtr& model, std::span<const WaveVector> ks,
                                           double k0 = 0.25);

/// sup over the sampled region of |F(f) - F(f_m)|, fitted against m.
VerificationReport ft_convergence(const ExtensionSpec& base, std::span<const double> m_schedule,
                                  std::span<const WaveVector> region);
/// Tensor sample of ±{values} per axis; every component clears the axis slab.
std::vector<WaveVector> axis_avoiding_region(int dim, std::span<const double> magnitudes);

// ---- inversion ----

/// Spectral data on R^dim. `batch` evaluates a tensor grid (x slowest) when present.
struct SpectralSource {
  int dim = 1;
  SpectralFn value;
  std::function<std::vector<Complex>(const std::array<std::vector<double>, 3>&)> batch;
  double support = 1.0;  // half-width of the spatial support; sets the k-panel width
};

SpectralSource spectral_of(const TransformPlan& plan);

struct InverseResult {
  double value = 0.0;
  double imag = 0.0;
  double quadrature_estimate = 0.0;
  double tail_bound = 0.0;
  double tail_exponent = 0.0;
};

/// Power-law envelope of |g| on the shell [R, shell·R], integrated over |k| > R in closed form.
struct PowerTail {
  double exponent = 0.0;
  double constant = 0.0;
  double tail = 0.0;
  bool divergent = false;
};
PowerTail spectral_tail(const SpectralFn& g, int dim, double R, double shell = 4.0);

/// Throws AccuracyFailure when the normalized tail bound exceeds tol.
std::vector<InverseResult> inverse_at_points(const SpectralSource& g, std::span<const Point> xs, double R,
                                             double tol, double shell = 4.0);
InverseResult inverse_at_point(const SpectralSource& g, const Point& x, double R, double tol,
                               double shell = 4.0);

/// max_x |f(x) - F^{-1}(F(f_m))(x)| across an m schedule. R = 0 grows R until the tail is small.
VerificationReport inversion_error(const ExtensionSpec& base, std::span<const double> m_schedule,
                                   std::span<const Point> xs, double R = 0.0,
                                   std::optional<double> final_bound = std::nullopt);

/// |r F(r, θ, φ)| along a schedule r -> 0: non-increasing and below tol at the end.
VerificationReport radial_limit_check(const ModelPtr& model, double theta, double phi,
                                      std::span<const double> radii, double tol = 1e-4);
bool generic_direction(double theta, double phi, int dim);

/// C S_{d-1} R^{d+e} / -(d+e); divergent when e >= -dim.
struct L1Tail {
  double value = 0.0;
  bool divergent = false;
};
L1Tail l1_tail(double constant, double exponent, int dim, double R);

/// ∫_{|k|<R} |F(∂f/∂x_i)|/|k| and |F(∂²f/∂x_i∂x_j)|/|k|² in polar or spherical coordinates.
VerificationReport weighted_ball_integrals(const ModelPtr& model, double R);

}  // namespace inflex
