#include "ehlab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ehlab/errors.hpp"
#include "ehlab/io.hpp"
#include "ehlab/parallel.hpp"

namespace ehlab::classical {

double wrap_angle(double x) {
  double r = x - kTwoPi * std::floor(x / kTwoPi);
  // floor can leave r == 2π when x is a tiny negative number
  if (r >= kTwoPi) r -= kTwoPi;
  if (r < 0.0) r = 0.0;
  return r;
}

void MapParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be a finite value >= 0, got " + std::to_string(lambda));
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("tau must be a finite value > 0, got " + std::to_string(tau));
  }
}

PhasePoint step_map(PhasePoint x, const MapParams& params) {
  const double p = wrap_angle(x.p + params.lambda * std::sin(x.theta));
  const double theta = wrap_angle(x.theta + params.tau * p);
  return {theta, p};
}

PhasePoint inverse_step_map(PhasePoint x, const MapParams& params) {
  const double theta = wrap_angle(x.theta - params.tau * x.p);
  const double p = wrap_angle(x.p - params.lambda * std::sin(theta));
  return {theta, p};
}

Eigen::Matrix2d step_jacobian(PhasePoint x, const MapParams& params) {
  const double kc = params.lambda * std::cos(x.theta);
  Eigen::Matrix2d j;
  j << 1.0 + params.tau * kc, params.tau,
       kc, 1.0;
  return j;
}

double lyapunov_exponent(PhasePoint x0, const MapParams& params, std::size_t n_steps) {
  params.validate();
  if (n_steps < kMinLyapunovSteps) {
    throw ConfigError("lyapunov_exponent needs n_steps >= 1000, got " + std::to_string(n_steps));
  }

  PhasePoint x = x0;
  double v_theta = std::numbers::sqrt2 / 2.0;
  double v_p = v_theta;
  double log_sum = 0.0;
  const std::size_t total = kLyapunovTransient + n_steps;
  for (std::size_t i = 0; i < total; ++i) {
    const double kc = params.lambda * std::cos(x.theta);
    const double dp = v_p + kc * v_theta;
    const double dtheta = v_theta + params.tau * dp;
    const double norm = std::hypot(dtheta, dp);
    v_theta = dtheta / norm;
    v_p = dp / norm;
    if (i >= kLyapunovTransient) log_sum += std::log(norm);
    x = step_map(x, params);
  }
  return log_sum / static_cast<double>(n_steps);
}

std::string to_string(OrbitLabel label) {
  return label == OrbitLabel::Chaotic ? "Chaotic" : "Regular";
}

OrbitClass classify_orbit(PhasePoint x0, const MapParams& params, std::size_t n_steps,
                          double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("threshold must be > 0");
  OrbitClass out;
  out.lyapunov = lyapunov_exponent(x0, params, n_steps);
  out.label = out.lyapunov > threshold ? OrbitLabel::Chaotic : OrbitLabel::Regular;
  out.n_steps = n_steps;
  out.threshold = threshold;
  out.x0 = x0;
  out.params = params;
  return out;
}

RegionEstimate estimate_chaotic_measure(const MapParams& params, std::size_t grid_side,
                                        std::size_t n_steps, double threshold) {
  params.validate();
  if (grid_side < 16) throw ConfigError("grid_side must be >= 16");
  if (n_steps < kMinLyapunovSteps) throw ConfigError("n_steps must be >= 1000");
  if (!(threshold > 0.0)) throw ConfigError("threshold must be > 0");

  std::vector<std::size_t> chaotic_per_row(grid_side, 0);
  const double h = kTwoPi / static_cast<double>(grid_side);
  parallel_for(grid_side, [&](std::size_t row) {
    std::size_t count = 0;
    const double theta = (static_cast<double>(row) + 0.5) * h;
    for (std::size_t col = 0; col < grid_side; ++col) {
      const PhasePoint x0{theta, (static_cast<double>(col) + 0.5) * h};
      if (lyapunov_exponent(x0, params, n_steps) > threshold) ++count;
    }
    chaotic_per_row[row] = count;
  });

  std::size_t chaotic = 0;
  for (auto c : chaotic_per_row) chaotic += c;
  const std::size_t n = grid_side * grid_side;

  RegionEstimate est;
  est.lambda = params.lambda;
  est.n_samples = n;
  est.threshold = threshold;
  est.mu_A = static_cast<double>(chaotic) / static_cast<double>(n);
  est.mu_E = static_cast<double>(n - chaotic) / static_cast<double>(n);
  est.ci_halfwidth = 1.96 * std::sqrt(est.mu_A * est.mu_E / static_cast<double>(n));
  return est;
}

bool contains(const CellSet& cells, PhasePoint x) {
  return std::any_of(cells.begin(), cells.end(), [&](const Cell& c) { return c.contains(x); });
}

double cell_union_measure(const CellSet& cells) {
  std::vector<double> ts;
  std::vector<double> ps;
  for (const auto& c : cells) {
    if (!(c.theta_max > c.theta_min) || !(c.p_max > c.p_min)) continue;
    ts.insert(ts.end(), {c.theta_min, c.theta_max});
    ps.insert(ps.end(), {c.p_min, c.p_max});
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ps.size(); ++j) {
      const PhasePoint mid{0.5 * (ts[i] + ts[i + 1]), 0.5 * (ps[j] + ps[j + 1])};
      if (contains(cells, mid)) {
        area += ((ts[i + 1] - ts[i]) / kTwoPi) * ((ps[j + 1] - ps[j]) / kTwoPi);
      }
    }
  }
  return area;
}

CellSet cells_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("cell set must be a JSON array");
  CellSet cells;
  for (const auto& item : j) {
    if (!item.is_object()) throw ConfigError("cell must be a JSON object");
    Cell c;
    try {
      c.theta_min = item.at("theta_min").get<double>();
      c.theta_max = item.at("theta_max").get<double>();
      c.p_min = item.at("p_min").get<double>();
      c.p_max = item.at("p_max").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("cell: ") + e.what());
    }
    cells.push_back(c);
  }
  return cells;
}

nlohmann::json cells_to_json(const CellSet& cells) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cells) {
    arr.push_back({{"theta_min", c.theta_min},
                   {"theta_max", c.theta_max},
                   {"p_min", c.p_min},
                   {"p_max", c.p_max}});
  }
  return arr;
}

namespace {

void validate_torus_cells(const CellSet& cells, const char* name) {
  for (const auto& c : cells) {
    const bool ok = c.theta_min >= 0.0 && c.theta_max <= kTwoPi && c.p_min >= 0.0 &&
                    c.p_max <= kTwoPi && c.theta_min <= c.theta_max && c.p_min <= c.p_max;
    if (!ok) {
      throw ConfigError(std::string("cell set ") + name +
                        ": cells must satisfy 0 <= min <= max <= 2π in both coordinates");
    }
  }
}

}  // namespace

CorrelationEstimate set_correlation(const CellSet& a, const CellSet& b, const MapParams& params,
                                    std::size_t t, std::size_t n_samples, std::uint64_t seed) {
  params.validate();
  validate_torus_cells(a, "A");
  validate_torus_cells(b, "B");
  if (n_samples < 10000) throw ConfigError("set_correlation needs n_samples >= 10000");

  CorrelationEstimate out;
  out.mu_a = cell_union_measure(a);
  out.mu_b = cell_union_measure(b);
  if (out.mu_a == 0.0 || out.mu_b == 0.0) {
    out.empty_input = true;
    out.value = -out.mu_a * out.mu_b;
    return out;
  }

  std::vector<unsigned char> hit(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    PhasePoint x{kTwoPi * uniform01(rng), kTwoPi * uniform01(rng)};
    if (!contains(a, x)) return;
    for (std::size_t s = 0; s < t; ++s) x = step_map(x, params);
    hit[i] = contains(b, x) ? 1 : 0;
  });

  std::size_t hits = 0;
  for (auto h : hit) hits += h;
  const double n = static_cast<double>(n_samples);
  out.mu_intersection = static_cast<double>(hits) / n;
  out.value = out.mu_intersection - out.mu_a * out.mu_b;
  out.std_error = std::sqrt(out.mu_intersection * (1.0 - out.mu_intersection) / n);
  return out;
}

void write_region_csv(std::ostream& out, const std::vector<RegionEstimate>& rows) {
  out << "lambda,mu_A,mu_E,n_samples,threshold,ci_halfwidth\n";
  for (const auto& r : rows) {
    out << io::format_double(r.lambda) << ',' << io::format_double(r.mu_A) << ','
        << io::format_double(r.mu_E) << ',' << r.n_samples << ','
        << io::format_double(r.threshold) << ',' << io::format_double(r.ci_halfwidth) << '\n';
  }
}

std::vector<RegionEstimate> read_region_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sweep CSV is empty");
  const auto header = io::split_csv_line(line);
  const std::vector<std::string> expected{"lambda", "mu_A", "mu_E",
                                          "n_samples", "threshold", "ci_halfwidth"};
  if (header != expected) {
    throw ConfigError("sweep CSV header must be lambda,mu_A,mu_E,n_samples,threshold,ci_halfwidth");
  }
  std::vector<RegionEstimate> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = io::split_csv_line(line);
    const std::string ctx = "sweep CSV line " + std::to_string(line_no);
    if (f.size() != expected.size()) throw ConfigError(ctx + ": expected 6 fields");
    RegionEstimate r;
    r.lambda = io::parse_double(f[0], ctx);
    r.mu_A = io::parse_double(f[1], ctx);
    r.mu_E = io::parse_double(f[2], ctx);
    r.n_samples = static_cast<std::size_t>(io::parse_double(f[3], ctx));
    r.threshold = io::parse_double(f[4], ctx);
    r.ci_halfwidth = io::parse_double(f[5], ctx);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ehlab::classical
