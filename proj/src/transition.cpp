#include "ehlab/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ehlab/errors.hpp"

namespace ehlab::transition {

void TransitionCurve::validate() const {
  if (!(lambda_c > 0.0) || !std::isfinite(lambda_c)) throw ConfigError("lambda_c must be > 0");
  if (!(mu_c > 0.0 && mu_c <= 1.0)) throw ConfigError("mu_c must lie in (0, 1]");
  if (!(epsilon_fraction >= 0.0 && epsilon_fraction <= kMaxEpsilonFraction)) {
    throw ConfigError("epsilon_fraction must lie in [0, 0.5]");
  }
}

double cubic_bracket(double x) { return x * x * (1.5 - 0.5 * x); }

double cubic_transition(double lambda, const TransitionCurve& curve) {
  curve.validate();
  if (!(lambda >= 0.0 && lambda <= curve.window_end())) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " lies outside the validity window [0, "
        << curve.window_end() << "] (lambda_c + epsilon)";
    throw DomainError(msg.str());
  }
  return curve.mu_c * cubic_bracket(lambda / curve.lambda_c);
}

double quadratic_small_lambda(double lambda, const TransitionCurve& curve) {
  curve.validate();
  if (!(lambda >= 0.0)) throw DomainError("quadratic_small_lambda needs lambda >= 0");
  const double x = lambda / curve.lambda_c;
  return curve.mu_c * 1.5 * x * x;
}

nlohmann::json to_json(const CriticalReport& r) {
  return {{"regular_limit", r.regular_limit},
          {"zero_slope", r.zero_slope},
          {"chaotic_limit", r.chaotic_limit},
          {"inflection_at_critical", r.inflection_at_critical},
          {"mu_at_smallest", r.mu_at_smallest},
          {"slope_at_zero", r.slope_at_zero},
          {"mu_at_largest", r.mu_at_largest},
          {"second_derivative", r.second_derivative},
          {"stencil", r.stencil}};
}

namespace {

// Coefficients of the Lagrange quadratic through (x0, x1, x2).
double quadratic_second_derivative(const double x[3], const double y[3]) {
  return 2.0 * (y[0] / ((x[0] - x[1]) * (x[0] - x[2])) +
                y[1] / ((x[1] - x[0]) * (x[1] - x[2])) +
                y[2] / ((x[2] - x[0]) * (x[2] - x[1])));
}

double quadratic_derivative_at(double at, const double x[3], const double y[3]) {
  return y[0] * ((at - x[1]) + (at - x[2])) / ((x[0] - x[1]) * (x[0] - x[2])) +
         y[1] * ((at - x[0]) + (at - x[2])) / ((x[1] - x[0]) * (x[1] - x[2])) +
         y[2] * ((at - x[0]) + (at - x[1])) / ((x[2] - x[0]) * (x[2] - x[1]));
}

}  // namespace

CriticalReport check_critical_conditions(const std::vector<CurveSample>& samples, double lambda_c,
                                         const CriticalTolerances& tol) {
  if (samples.size() < 5) {
    throw InsufficientDataError("check_critical_conditions needs at least 5 samples, got " +
                                std::to_string(samples.size()));
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].lambda > samples[i - 1].lambda)) {
      throw ConfigError("samples must be strictly increasing in lambda");
    }
  }
  if (!(lambda_c > samples.front().lambda && lambda_c < samples.back().lambda)) {
    throw ConfigError("lambda_c must lie strictly inside the sampled lambda range");
  }

  double mu_min = samples.front().mu;
  double mu_max = samples.front().mu;
  for (const auto& s : samples) {
    mu_min = std::min(mu_min, s.mu);
    mu_max = std::max(mu_max, s.mu);
  }
  const double mu_span = std::max(mu_max - mu_min, std::numeric_limits<double>::min());
  const double lambda_span = samples.back().lambda - samples.front().lambda;

  CriticalReport r;
  r.mu_at_smallest = samples.front().mu;
  r.mu_at_largest = samples.back().mu;
  r.regular_limit = std::abs(r.mu_at_smallest) <= tol.zero_tol;
  r.chaotic_limit = std::abs(r.mu_at_largest - 1.0) <= tol.saturation_tol;

  {
    const double x[3] = {samples[0].lambda, samples[1].lambda, samples[2].lambda};
    const double y[3] = {samples[0].mu, samples[1].mu, samples[2].mu};
    r.slope_at_zero = quadratic_derivative_at(0.0, x, y);
    r.zero_slope = std::abs(r.slope_at_zero) * lambda_span / mu_span <= tol.slope_tol;
  }

  // three samples nearest lambda_c
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(samples[a].lambda - lambda_c) < std::abs(samples[b].lambda - lambda_c);
  });
  std::sort(order.begin(), order.begin() + 3);
  double x[3];
  double y[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = samples[order[i]].lambda;
    y[i] = samples[order[i]].mu;
    r.stencil[i] = x[i];
  }
  r.second_derivative = quadratic_second_derivative(x, y);
  const double curvature_scale = 3.0 * mu_span / (lambda_c * lambda_c);
  r.inflection_at_critical = std::abs(r.second_derivative) <= tol.curvature_tol * curvature_scale;
  return r;
}

nlohmann::json to_json(const FitResult& r) {
  return {{"lambda_c", r.lambda_c},
          {"mu_c", r.mu_c},
          {"rss", r.rss},
          {"n_points", r.n_points},
          {"fit_window", {r.fit_window[0], r.fit_window[1]}}};
}

FitResult fit_result_from_json(const nlohmann::json& j) {
  try {
    FitResult r;
    r.lambda_c = j.at("lambda_c").get<double>();
    r.mu_c = j.at("mu_c").get<double>();
    r.rss = j.at("rss").get<double>();
    r.n_points = j.at("n_points").get<std::size_t>();
    r.fit_window = {j.at("fit_window").at(0).get<double>(), j.at("fit_window").at(1).get<double>()};
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("fit result JSON: ") + e.what());
  }
}

namespace {

struct WindowFit {
  double objective = std::numeric_limits<double>::infinity();
  double mu_c = 0.0;
  double rss = 0.0;
  std::size_t n = 0;
};

// Weighted chi-square of the cubic on the window [0, lambda_c (1 + eps)] plus
// a fixed cost for every sample left outside it. Without that cost a window
// holding only a few points near the origin always looks best.
class CubicObjective {
 public:
  CubicObjective(const std::vector<FitSample>& samples, const FitOptions& opt)
      : samples_(samples), opt_(opt) {
    weights_.reserve(samples.size());
    for (const auto& s : samples) {
      const double sigma = std::max(s.ci_halfwidth, opt.weight_floor) / 1.96;
      weights_.push_back(1.0 / (sigma * sigma));
    }
  }

  WindowFit evaluate(double lambda_c) const {
    const double end = lambda_c * (1.0 + opt_.epsilon_fraction);
    double sgg = 0.0;
    double sgy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < samples_.size() && samples_[i].lambda <= end; ++i) {
      const double g = cubic_bracket(samples_[i].lambda / lambda_c);
      sgg += weights_[i] * g * g;
      sgy += weights_[i] * g * samples_[i].mu;
      ++n;
    }
    WindowFit fit;
    fit.n = n;
    if (n < opt_.min_window_points || !(sgg > 0.0) || !(sgy > 0.0)) return fit;
    // mu_c is a measure; the clamp is the exact minimizer on (0, 1] because
    // the chi-square is a convex quadratic in mu_c.
    fit.mu_c = std::min(sgy / sgg, 1.0);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = samples_[i].mu - fit.mu_c * cubic_bracket(samples_[i].lambda / lambda_c);
      chi2 += weights_[i] * r * r;
      fit.rss += r * r;
    }
    fit.objective = chi2 + opt_.exclusion_cost * static_cast<double>(samples_.size() - n);
    return fit;
  }

 private:
  const std::vector<FitSample>& samples_;
  const FitOptions& opt_;
  std::vector<double> weights_;
};

}  // namespace

FitResult fit_transition(std::vector<FitSample> samples, const FitOptions& options) {
  if (samples.size() < 6) {
    throw InsufficientDataError("fit_transition needs at least 6 samples, got " +
                                std::to_string(samples.size()));
  }
  if (!(options.epsilon_fraction >= 0.0 && options.epsilon_fraction <= kMaxEpsilonFraction)) {
    throw ConfigError("epsilon_fraction must lie in [0, 0.5]");
  }
  if (options.min_window_points < 3 || options.scan_points < 3) {
    throw ConfigError("fit options: min_window_points and scan_points must be >= 3");
  }
  if (!(options.exclusion_cost >= 0.0) || !(options.weight_floor > 0.0)) {
    throw ConfigError("fit options: exclusion_cost must be >= 0 and weight_floor > 0");
  }
  for (const auto& s : samples) {
    if (!std::isfinite(s.lambda) || !std::isfinite(s.mu) || !(s.ci_halfwidth >= 0.0)) {
      throw ConfigError("fit samples must be finite with ci_halfwidth >= 0");
    }
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const FitSample& a, const FitSample& b) { return a.lambda < b.lambda; });
  if (samples.front().lambda < 0.0 || samples.front().lambda > 1e-12 ||
      samples.back().lambda < 2.0) {
    throw InsufficientDataError("fit_transition needs samples spanning lambda in [0, 2]");
  }
  const bool degenerate = std::all_of(samples.begin(), samples.end(), [&](const FitSample& s) {
    return s.mu == samples.front().mu;
  });
  if (degenerate) throw SingularFitError("all mu_A values are equal; the fit is singular");

  const CubicObjective objective(samples, options);
  const double lo = samples[options.min_window_points - 1].lambda / (1.0 + options.epsilon_fraction);
  const double hi = samples.back().lambda;
  if (!(lo < hi)) throw InsufficientDataError("too few samples inside any admissible fit window");

  // Coarse scan. With tight error bars the basin around the true lambda_c
  // can be narrower than the grid spacing, so every local minimum of the
  // scan is refined, not only the lowest grid value.
  const std::size_t k = options.scan_points;
  std::vector<double> grid(k), values(k);
  for (std::size_t i = 0; i < k; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
    values[i] = objective.evaluate(grid[i]).objective;
  }
  if (std::none_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw SingularFitError("no admissible lambda_c candidate");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto refine = [&](std::size_t i) {
    double a = grid[i == 0 ? 0 : i - 1];
    double b = grid[std::min(i + 1, k - 1)];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective.evaluate(c).objective;
    double fd = objective.evaluate(d).objective;
    for (int iter = 0; iter < 200 && (b - a) > options.lambda_tolerance * std::max(1.0, hi); ++iter) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective.evaluate(c).objective;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective.evaluate(d).objective;
      }
    }
    // The objective is only piecewise smooth as samples enter or leave the
    // window, so keep the grid point if the refined one is not better.
    const double mid = 0.5 * (a + b);
    const double v = objective.evaluate(mid).objective;
    return v <= values[i] ? std::make_pair(mid, v) : std::make_pair(grid[i], values[i]);
  };

  double lambda_c = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(values[i])) continue;
    if (i > 0 && values[i - 1] < values[i]) continue;
    if (i + 1 < k && values[i + 1] < values[i]) continue;
    const auto [x, v] = refine(i);
    if (v < best_value) {
      best_value = v;
      lambda_c = x;
    }
  }
  const WindowFit fit = objective.evaluate(lambda_c);

  FitResult out;
  out.lambda_c = lambda_c;
  out.mu_c = fit.mu_c;
  out.rss = fit.rss;
  out.n_points = fit.n;
  out.fit_window = {0.0, lambda_c * (1.0 + options.epsilon_fraction)};
  return out;
}

}  // namespace ehlab::transition
