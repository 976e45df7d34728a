#pragma once

namespace inflex {

/// Every tolerance used by the verification routines lives here.
struct Tolerances {
  double jet_residual_rel = 1e-8;     // boundary-jet matching, relative to 1+|a_i|
  double quadrature = 1e-9;           // target accuracy of 1D polynomial quadrature
  double ftc_rel = 1e-8;              // |∫|h^(n)| - |a_{n-1}|| relative to 1+|a_{n-1}|
  double seam_rel = 1e-7;             // two-sided derivative mismatch across seams
  double ratio_identity = 1e-7;       // |F(∂f) - i k F(f)|
  double model_tail = 1e-10;          // L1 mass discarded when truncating a model
  double transform_rel = 1e-6;        // refinement mismatch that aborts a transform
  double axis_slab = 0.25;            // |k_i| below this counts as axis-adjacent
  double convergence_slope = -0.8;    // required log-log slope of sup|F(f)-F(f_m)| vs m
  double radial_limit = 1e-4;         // final |r F(r u)| in the radial limit check
  double inversion_final = 1e-5;      // Gaussian inversion error at the largest m
  double budget_slope_slack = 0.1;    // log-log budget slope may exceed dim by this
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace inflex
