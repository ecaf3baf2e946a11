#pragma once

// Quantum kicked rotator on a finite momentum ladder.
//
// The computational basis is the symmetric ladder k = -(N-1)/2 .. (N-1)/2
// (row index i <-> k = i - (N-1)/2). One period is
//   F = exp(-i (lambda/hbar) cos(theta)) exp(-i tau hbar (k + beta)^2 / 2),
// with the kick built on the N-point angle grid theta_j = 2 pi j / N and
// carried to the momentum basis by the unitary DFT. beta is the quasi-momentum
// (0 by default); a nonzero beta breaks the k -> -k parity that otherwise
// pairs quasi-energies into near-degenerate doublets.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace ehlab::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultGapTol = 1e-9;

struct QuantumParams {
  int dim = 129;
  double lambda = 0.0;
  double hbar = 1.0;
  double tau = 1.0;
  double quasi_momentum = 0.0;

  /// Throws ConfigError on: even or non-positive dim, lambda < 0, hbar <= 0,
  /// tau <= 0, quasi_momentum outside [0, 1), or tau*hbar/(4 pi) within 1e-6
  /// of a rational p/q with q <= 8 (quantum resonance).
  void validate() const;

  int k_max() const { return (dim - 1) / 2; }
  int k_of(int index) const { return index - k_max(); }
  int index_of(int k) const { return k + k_max(); }
  /// Physical momentum hbar (k + beta) of ladder index `index`.
  double momentum(int index) const;
};

nlohmann::json to_json(const QuantumParams& p);
QuantumParams quantum_params_from_json(const nlohmann::json& j);

/// Hermitian, unit-trace, positive N x N matrix.
class DensityState {
 public:
  /// Validates Hermiticity (1e-10), trace (1e-10) and positivity (-1e-8).
  static DensityState from_matrix(Matrix m);
  /// |psi><psi| / <psi|psi>.
  static DensityState pure(const Vector& psi);
  static DensityState maximally_mixed(int dim);
  static DensityState momentum_eigenstate(const QuantumParams& params, int k);
  /// Skips validation. For matrices produced by unitary conjugation or
  /// dephasing of an already valid state.
  static DensityState assume_valid(Matrix m);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  explicit DensityState(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

class ObservableMatrix {
 public:
  /// Throws HermiticityError if not Hermitian to 1e-10.
  ObservableMatrix(Matrix m, std::string label);

  const Matrix& matrix() const { return m_; }
  const std::string& label() const { return label_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
  std::string label_;
};

/// Projector onto ladder indices with k in [k_min, k_max).
ObservableMatrix momentum_window_projector(const QuantumParams& params, int k_min, int k_max);
/// cos(theta) on the angle grid, expressed in the momentum basis.
ObservableMatrix cos_theta_observable(const QuantumParams& params);
/// L^2 = (hbar (k + beta))^2.
ObservableMatrix momentum_squared_observable(const QuantumParams& params);
/// Window |k| < N/8, cos(theta) and L^2.
std::vector<ObservableMatrix> default_observable_set(const QuantumParams& params);

/// Kick exp(-i (lambda/hbar) cos theta) in the momentum basis, via the DFT.
Matrix kick_operator(const QuantumParams& params);
/// Diagonal of the free evolution in the momentum basis.
Vector free_phases(const QuantumParams& params);

class FloquetSystem {
 public:
  const QuantumParams& params() const { return params_; }
  const Matrix& unitary() const { return unitary_; }
  /// phi_k in [0, 2 pi), ascending; F |k> = exp(-i phi_k) |k>.
  const Eigen::VectorXd& quasi_energies() const { return phi_; }
  /// Orthonormal eigenvectors as columns, in the order of quasi_energies().
  const Matrix& eigenbasis() const { return basis_; }
  /// Eigen-index pairs (i, j) whose circular quasi-energy distance is below gap_tol.
  const std::vector<std::pair<int, int>>& degeneracy_flags() const { return degenerate_; }
  double gap_tol() const { return gap_tol_; }
  /// max |F v_k - exp(-i phi_k) v_k| over all k.
  double eigen_residual() const { return residual_; }
  int dim() const { return params_.dim; }

  /// exp(-i t phi_k) for every k.
  Vector phases(double t) const;

 private:
  friend FloquetSystem build_floquet(const QuantumParams& params, double gap_tol);
  FloquetSystem() = default;

  QuantumParams params_;
  Matrix unitary_;
  Eigen::VectorXd phi_;
  Matrix basis_;
  std::vector<std::pair<int, int>> degenerate_;
  double gap_tol_ = kDefaultGapTol;
  double residual_ = 0.0;
};

/// Builds F and its spectral decomposition (complex Schur form of the normal
/// matrix F). Throws ConfigError on invalid params and NumericError if the
/// eigensolver fails or its residual exceeds 1e-8.
FloquetSystem build_floquet(const QuantumParams& params, double gap_tol = kDefaultGapTol);

/// F^n rho (F^n)^dagger, evaluated in the Floquet eigenbasis.
DensityState evolve(const DensityState& rho, const FloquetSystem& system, long long n);

/// F^n psi, evaluated in the Floquet eigenbasis.
Vector evolve_state(const Vector& psi, const FloquetSystem& system, long long n);

/// Diagonal part of rho0 in the Floquet eigenbasis. Throws
/// DegenerateSpectrumError if the system carries degeneracy flags.
DensityState cesaro_limit_state(const DensityState& rho0, const FloquetSystem& system);

/// Tr(rho O). The imaginary residue must stay below 1e-10 max(1, max|O_ij|).
double expectation(const DensityState& rho, const ObservableMatrix& o);

/// (rho_t | O) - (rho_star | O).
double quantum_correlation(const DensityState& rho_t, const ObservableMatrix& o,
                           const DensityState& rho_star);

struct CorrelationSeries {
  std::vector<long long> times;
  std::vector<double> c_q;
  /// cesaro[n] is the mean of c_q[0..n].
  std::vector<double> cesaro;
  std::string observable_label;
  std::string state_label;
  /// (rho_star | O).
  double equilibrium_value = 0.0;
  /// max over n of (n + 1) |cesaro[n]|.
  double cesaro_constant = 0.0;
};

/// C_Q(rho(t), O) for t = 0 .. horizon - 1 and running Cesaro averages, with
/// rho_star from cesaro_limit_state.
CorrelationSeries correlation_series(const DensityState& rho0, const FloquetSystem& system,
                                     const ObservableMatrix& o, long long horizon,
                                     std::string state_label = "rho0");

/// C_Q(rho(t), O) at arbitrary times, same conventions as correlation_series.
std::vector<double> correlation_at_times(const DensityState& rho0, const FloquetSystem& system,
                                         const ObservableMatrix& o,
                                         const std::vector<long long>& times);

/// Normalized complex-Gaussian vector (Haar-distributed pure state).
Vector haar_random_state(int dim, std::mt19937_64& rng);

/// Fraction of n_states Haar-random pure states whose max over o_set of
/// |C_Q(rho(t), O)| stays below tol for every t in the last decile of
/// [0, horizon). State i draws from stream_rng(seed, i).
double mixing_volume_fraction(const FloquetSystem& system, const std::vector<ObservableMatrix>& o_set,
                              std::size_t n_states, long long horizon, double tol,
                              std::uint64_t seed);

struct MomentumProbability {
  int k = 0;
  double p = 0.0;
};

/// Diagonal of rho in the momentum basis.
std::vector<MomentumProbability> momentum_distribution(const DensityState& rho);

struct LocalizationFit {
  /// l_s from slope = -2 / l_s; +infinity when the slope is not negative.
  double length = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  bool localized() const;
};

/// Least-squares line through ln p(k) versus |k| on the bulk of the ladder
/// (|k| <= bulk_fraction * k_max, p > 0).
LocalizationFit localization_length(const std::vector<MomentumProbability>& distribution,
                                    double bulk_fraction = 0.9);

// CSV writers: t,c_q,cesaro / k,p / k,phi_k
void write_series_csv(std::ostream& out, const CorrelationSeries& series);
void write_momentum_csv(std::ostream& out, const std::vector<MomentumProbability>& dist);
void write_spectrum_csv(std::ostream& out, const FloquetSystem& system);

}  // namespace ehlab::quantum
