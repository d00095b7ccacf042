#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csvm/document.hpp"

namespace csvm {

struct ProgressCurve {
  std::vector<double> t;  // strictly increasing
  std::vector<double> p;  // product signal, same length as t
};

/// Slow-binding inhibition progress-curve parameters:
/// P(t) = v_st*t + (v0 - v_st)*(1 - exp(-k*t))/k, with P = v0*t when k = 0.
struct SlowBindingParams {
  double k = 0;
  double v0 = 0;
  double v_st = 0;
};

struct ParameterEstimate {
  std::string name;
  double solution = 0;
  double conf_min = 0;
  double conf_max = 0;
};

struct FitResult {
  SlowBindingParams params;
  std::array<ParameterEstimate, 3> estimates;  // k, Vo, Vs
  double f_value = 0;                          // final sum of squared residuals
  double et = 0;                               // residual standard deviation
  int quality = 0;                             // 0..1000 score
  std::vector<double> residuals;               // observed minus fitted
  int iterations = 0;
};

double eval_progress(const SlowBindingParams& params, double t);

/// Levenberg-Marquardt fit of (k, v0, v_st) with an analytic Jacobian.
/// Confidence half-widths come from the Gauss-Newton normal matrix at the
/// solution scaled by the residual variance.
FitResult fit_progress(const ProgressCurve& curve, const SlowBindingParams& init);

/// Rough starting point read off the curve: early slope, late slope and a
/// rate guessed from the transient intercept. Good enough to seed the fit.
SlowBindingParams estimate_initial_params(const ProgressCurve& curve);

/// Render one fit as a six-column result table: observed data, fitted
/// values and residuals next to a key/value block holding the solution.
Document fit_result_to_document(const ProgressCurve& curve, const FitResult& fit,
                                std::string_view source_label, std::string_view model_name);

/// One row per result table: run descriptors, then the parameter groups
/// flattened left to right. Tables with fewer groups are padded.
Document aggregate_results(const std::vector<Document>& docs);

struct LineFit {
  double k_on = 0;
  double k_off = 0;
};

/// Straight-line fit of observed rates against inhibitor concentration
/// corrected for substrate shielding: k = k_off + k_on*[I]/(1+[S]/Km).
LineFit fit_k_vs_inhibitor(const std::vector<std::pair<double, double>>& points, double s_conc,
                           double km);

/// Through-origin fit of (Vmax/v0 - 1) against [I]; returns the apparent
/// inhibition constant 1/slope.
double fit_ki_star(const std::vector<std::pair<double, double>>& points);

}  // namespace csvm
