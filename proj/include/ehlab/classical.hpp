#pragma once

// Classical kicked rotator: the standard map on the 2π × 2π torus, finite-time
// Lyapunov exponents, chaotic-region measure estimates and set correlations.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace ehlab::classical {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultThreshold = 0.05;
/// Iterations discarded before the Lyapunov sum starts accumulating.
inline constexpr std::size_t kLyapunovTransient = 100;
inline constexpr std::size_t kMinLyapunovSteps = 1000;

/// Reduces x to [0, 2π).
double wrap_angle(double x);

struct PhasePoint {
  double theta = 0.0;
  double p = 0.0;
};

struct MapParams {
  double lambda = 0.0;
  double tau = 1.0;

  /// Throws ConfigError unless lambda >= 0 and tau > 0.
  void validate() const;
};

/// One application of the standard map:
///   p' = p + lambda sin(theta),  theta' = theta + tau p',  both mod 2π.
PhasePoint step_map(PhasePoint x, const MapParams& params);

/// Exact inverse of step_map.
PhasePoint inverse_step_map(PhasePoint x, const MapParams& params);

/// d(theta', p') / d(theta, p) evaluated at x. Rows/columns ordered (theta, p).
Eigen::Matrix2d step_jacobian(PhasePoint x, const MapParams& params);

/// Largest Lyapunov exponent per kick from the tangent map. The tangent vector
/// starts at (1, 1)/√2, is renormalized every step, and the first
/// kLyapunovTransient steps are discarded. Requires n_steps >= 1000.
double lyapunov_exponent(PhasePoint x0, const MapParams& params, std::size_t n_steps);

enum class OrbitLabel { Regular, Chaotic };

std::string to_string(OrbitLabel label);

struct OrbitClass {
  OrbitLabel label = OrbitLabel::Regular;
  double lyapunov = 0.0;
  std::size_t n_steps = 0;
  double threshold = kDefaultThreshold;
  PhasePoint x0;
  MapParams params;
};

/// Chaotic iff the exponent is strictly above threshold; ties go to Regular.
OrbitClass classify_orbit(PhasePoint x0, const MapParams& params, std::size_t n_steps,
                          double threshold = kDefaultThreshold);

struct RegionEstimate {
  double lambda = 0.0;
  double mu_A = 0.0;
  double mu_E = 1.0;
  std::size_t n_samples = 0;
  double threshold = kDefaultThreshold;
  /// 95% normal-approximation half-width of the binomial proportion.
  double ci_halfwidth = 0.0;
};

/// Fraction of a grid_side × grid_side grid of cell-centred initial conditions
/// classified Chaotic. Rows are distributed over parallel_for.
RegionEstimate estimate_chaotic_measure(const MapParams& params, std::size_t grid_side,
                                        std::size_t n_steps,
                                        double threshold = kDefaultThreshold);

/// Axis-aligned cell, closed on the lower edges and open on the upper ones.
struct Cell {
  double theta_min = 0.0;
  double theta_max = kTwoPi;
  double p_min = 0.0;
  double p_max = kTwoPi;

  bool contains(PhasePoint x) const {
    return x.theta >= theta_min && x.theta < theta_max && x.p >= p_min && x.p < p_max;
  }
};

using CellSet = std::vector<Cell>;

bool contains(const CellSet& cells, PhasePoint x);

/// Normalized (total torus = 1) area of the union of the cells.
double cell_union_measure(const CellSet& cells);

/// Parses `[{"theta_min":..,"theta_max":..,"p_min":..,"p_max":..}, ...]`.
CellSet cells_from_json(const nlohmann::json& j);
nlohmann::json cells_to_json(const CellSet& cells);

struct CorrelationEstimate {
  /// mu(T^t A ∩ B) - mu(A) mu(B).
  double value = 0.0;
  /// Monte-Carlo standard error of the intersection estimate.
  double std_error = 0.0;
  double mu_a = 0.0;
  double mu_b = 0.0;
  double mu_intersection = 0.0;
  /// Set when A or B has zero measure; value is then exactly -mu(A) mu(B).
  bool empty_input = false;
};

/// Monte-Carlo estimate of C(T^t A, B). mu(A) and mu(B) are exact cell-union
/// areas; the intersection is the fraction of uniform samples x with x in A
/// and T^t x in B. Sample i draws from stream_rng(seed, i).
CorrelationEstimate set_correlation(const CellSet& a, const CellSet& b, const MapParams& params,
                                    std::size_t t, std::size_t n_samples, std::uint64_t seed);

// CSV with header lambda,mu_A,mu_E,n_samples,threshold,ci_halfwidth
void write_region_csv(std::ostream& out, const std::vector<RegionEstimate>& rows);
std::vector<RegionEstimate> read_region_csv(std::istream& in);

}  // namespace ehlab::classical
