#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "inflex/models.hpp"
#include "inflex/polyext.hpp"
#include "inflex/report.hpp"

namespace inflex {

struct ExtensionSpec {
  int dim = 2;
  double m = 4.0;
  int order_n = 3;
  int collar_exponent = 0;  // 0 picks the dimension's default (1D: 1, 2D: 2, 3D: 3)
  ModelPtr model;
};

enum class Region { interior, face, edge, corner, outside };
std::string_view to_string(Region r);

/// Model order an extension needs: (dim-1)(n-1) + n.
int required_model_order(int dim, int n);

/// The compactly supported extension f_m of a model off the box C_m = [-m, m]^dim.
///
/// Stages run one axis at a time (2D: y then x; 3D: x, y, z). A stage keeps the
/// previous object on |x_a| <= m, glues collar polynomials on m < |x_a| <= m + w whose
/// jets are normal partials of the previous object at x_a = ±m, and is zero beyond.
class Extension {
 public:
  explicit Extension(ExtensionSpec spec);

  const ExtensionSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int order() const { return spec_.order_n; }
  double m() const { return spec_.m; }
  double width() const { return width_; }
  /// m + w, as the collar stores it.
  double outer() const { return outer_; }
  const std::vector<int>& stage_axes() const { return stages_; }

  /// Partial derivative of f_m; |idx| <= n.
  double eval(const Point& x, const MultiIndex& idx = {0, 0, 0}) const;

  /// Bit a is set when m < |x_a| <= m + w; -1 outside C_{m+w}.
  int collar_mask(const Point& x) const;
  Region classify(const Point& x) const;

  /// Sign classes of the top normal derivative sampled on each face, with the measured m_min.
  const Json& sign_samples() const { return sign_samples_; }

 private:
  double eval_level(int level, const Point& x, const MultiIndex& idx) const;

  ExtensionSpec spec_;
  const UnitCollarBasis* basis_;
  std::vector<long double> wpow_;  // w^e for e in [-2n, n]
  double width_;
  double outer_;
  std::vector<int> stages_;
  Json sign_samples_;
};

Extension build_extension(ExtensionSpec spec);

/// Two-sided limits of every partial of order <= n-1 across each seam.
VerificationReport seam_report(const Extension& ext, int samples_per_seam = 10);

/// L1 norms of the order-n partial along each axis, split by region type.
struct NormBudget {
  struct Case {
    std::string label;
    int axis = 0;
    int mask = 0;
    double value = 0.0;
  };
  std::vector<Case> cases;
  std::array<double, 3> per_axis{0, 0, 0};
  double max_axis() const;
};

NormBudget norm_budget(const Extension& ext);

/// Budget growth across an m-schedule: max-axis budget <= G m^dim with G fitted at the smallest m.
VerificationReport budget_scaling(const ExtensionSpec& base, std::span<const double> m_schedule);

struct CollarNorms {
  double l1 = 0.0;
  double sup = 0.0;
  /// Chained bound (Σ_j sup|H_j|)^dim · max |face partial| over the sampled jets.
  double sup_bound = 0.0;
};

CollarNorms collar_l1(const Extension& ext);

/// L1 · m bounded by E fitted at the smallest m, and the collar sup bounded by one constant.
VerificationReport collar_bound_check(const ExtensionSpec& base, std::span<const double> m_schedule);

struct GridSpec {
  std::array<int, 3> counts{1, 1, 1};
  Point origin{0, 0, 0};
  Point spacing{1, 1, 1};
};

/// Symmetric grid over [-(m+w)·pad, (m+w)·pad]^dim with `points` per axis.
GridSpec covering_grid(const Extension& ext, int points, double pad = 1.05);

/// Writes "x,y[,z],value" rows (x slowest) plus a JSON sidecar next to the CSV.
void export_field(const Extension& ext, const GridSpec& grid, const std::filesystem::path& csv_path);

}  // namespace inflex
