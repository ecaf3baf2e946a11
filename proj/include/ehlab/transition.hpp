#pragma once

// Cubic law for the growth of the chaotic measure with kick strength,
//   mu(lambda) = mu_c (3/2 x^2 - 1/2 x^3),  x = lambda / lambda_c,
// its small-lambda quadratic limit, the critical-condition checks on sampled
// curves, and the inverse problem of fitting (lambda_c, mu_c) to data.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

namespace ehlab::transition {

inline constexpr double kDefaultEpsilonFraction = 0.2;
inline constexpr double kMaxEpsilonFraction = 0.5;

struct TransitionCurve {
  double lambda_c = 1.0;
  double mu_c = 1.0;
  /// Validity window is [0, lambda_c (1 + epsilon_fraction)].
  double epsilon_fraction = kDefaultEpsilonFraction;

  void validate() const;
  double window_end() const { return lambda_c * (1.0 + epsilon_fraction); }
};

/// The bracket 3/2 x^2 - 1/2 x^3.
double cubic_bracket(double x);

/// Throws DomainError when lambda lies outside the validity window.
double cubic_transition(double lambda, const TransitionCurve& curve);

/// mu_c (3/2)(lambda/lambda_c)^2. Defined for every lambda >= 0.
double quadratic_small_lambda(double lambda, const TransitionCurve& curve);

struct CurveSample {
  double lambda = 0.0;
  double mu = 0.0;
};

struct CriticalTolerances {
  /// |mu| at the smallest sampled lambda.
  double zero_tol = 0.05;
  /// |mu'(0)| in units of mu_span / lambda_span.
  double slope_tol = 0.1;
  /// |mu - 1| at the largest sampled lambda.
  double saturation_tol = 0.1;
  /// |mu''(lambda_c)| in units of 3 mu_span / lambda_c^2, the cubic's
  /// curvature at the origin.
  double curvature_tol = 0.1;
};

struct CriticalReport {
  bool regular_limit = false;          // mu -> 0 as lambda -> 0
  bool zero_slope = false;             // mu'(0) = 0, reported on its own
  bool chaotic_limit = false;          // mu -> 1 for lambda >> lambda_c
  bool inflection_at_critical = false; // mu''(lambda_c) = 0

  double mu_at_smallest = 0.0;
  double slope_at_zero = 0.0;
  double mu_at_largest = 0.0;
  double second_derivative = 0.0;
  /// The three samples used for the second difference.
  std::array<double, 3> stencil{};

  /// The three limit conditions: regular, chaotic, inflection.
  bool limits_pass() const { return regular_limit && chaotic_limit && inflection_at_critical; }
};

nlohmann::json to_json(const CriticalReport& r);

/// Samples must be sorted by lambda with at least 5 entries; the slope at 0 is
/// the derivative at lambda = 0 of the quadratic through the first three
/// samples, and the second derivative is the three-point difference over the
/// samples nearest lambda_c.
CriticalReport check_critical_conditions(const std::vector<CurveSample>& samples, double lambda_c,
                                         const CriticalTolerances& tol = {});

struct FitSample {
  double lambda = 0.0;
  double mu = 0.0;
  double ci_halfwidth = 0.0;
};

struct FitOptions {
  double epsilon_fraction = kDefaultEpsilonFraction;
  /// Inverse-variance weights use sigma = max(ci_halfwidth, weight_floor) / 1.96.
  double weight_floor = 1e-4;
  /// Chi-square charged for each sample beyond the fit window.
  double exclusion_cost = 2.0;
  std::size_t scan_points = 400;
  std::size_t min_window_points = 4;
  double lambda_tolerance = 1e-14;
};

struct FitResult {
  double lambda_c = 0.0;
  double mu_c = 0.0;
  /// Unweighted residual sum of squares over the fit window.
  double rss = 0.0;
  std::size_t n_points = 0;
  std::array<double, 2> fit_window{};
};

nlohmann::json to_json(const FitResult& r);
FitResult fit_result_from_json(const nlohmann::json& j);

/// Weighted least squares of the cubic law over [0, lambda_c (1 + eps)].
/// mu_c is solved in closed form (restricted to (0, 1]) for each trial
/// lambda_c; lambda_c itself is located by a coarse scan, with golden-section
/// refinement of every local minimum of the scan. The objective is the window
/// chi-square plus exclusion_cost per sample outside the window. Needs >= 6 samples spanning [0, 2].
FitResult fit_transition(std::vector<FitSample> samples, const FitOptions& options = {});

}  // namespace ehlab::transition
