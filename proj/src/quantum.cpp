#include "ehlab/quantum.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "ehlab/errors.hpp"
#include "ehlab/io.hpp"
#include "ehlab/parallel.hpp"

namespace ehlab::quantum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPositivityTol = -1e-8;
constexpr double kEigenResidualTol = 1e-8;
constexpr Eigen::Index kTimeBlock = 256;

double wrap_phase(double x) {
  double r = x - kTwoPi * std::floor(x / kTwoPi);
  if (r >= kTwoPi) r -= kTwoPi;
  if (r < 0.0) r = 0.0;
  return r;
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_dim(int expected, int got, const char* what) {
  if (expected != got) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" + std::to_string(expected) +
                      " vs " + std::to_string(got) + ")");
  }
}

void require_nondegenerate(const FloquetSystem& system, const char* what) {
  const auto& flags = system.degeneracy_flags();
  if (flags.empty()) return;
  std::ostringstream msg;
  msg << what << ": quasi-energy spectrum has " << flags.size()
      << " degenerate pair(s) below gap_tol " << system.gap_tol() << ":";
  const std::size_t shown = std::min<std::size_t>(flags.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) msg << " (" << flags[i].first << "," << flags[i].second << ")";
  if (shown < flags.size()) msg << " ...";
  throw DegenerateSpectrumError(msg.str(), flags);
}

// N x N circulant W^dagger diag(values) W carrying a function sampled on the
// angle grid to the momentum ladder, W_{jk} = exp(i k theta_j) / sqrt(N).
Matrix angle_diagonal_to_momentum(const Vector& values) {
  const Eigen::Index n = values.size();
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    roots[static_cast<std::size_t>(r)] =
        std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(n));
  }
  std::vector<Complex> c(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < n; ++d) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) acc += values[j] * roots[static_cast<std::size_t>((d * j) % n)];
    c[static_cast<std::size_t>(d)] = acc / static_cast<double>(n);
  }
  Matrix out(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      out(row, col) = c[static_cast<std::size_t>(((row - col) % n + n) % n)];
    }
  }
  return out;
}

Vector phases_at(const Eigen::VectorXd& phi, double t) {
  Vector u(phi.size());
  for (Eigen::Index k = 0; k < phi.size(); ++k) u[k] = std::polar(1.0, -std::fmod(t * phi[k], kTwoPi));
  return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters

void QuantumParams::validate() const {
  if (dim < 1 || dim % 2 == 0) throw ConfigError("dim must be an odd positive integer");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("hbar must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be > 0");
  if (!(quasi_momentum >= 0.0 && quasi_momentum < 1.0)) {
    throw ConfigError("quasi_momentum must lie in [0, 1)");
  }
  const double x = tau * hbar / (4.0 * std::numbers::pi);
  for (int q = 1; q <= 8; ++q) {
    const double p = std::round(x * q);
    if (std::abs(x - p / q) < 1e-6) {
      std::ostringstream msg;
      msg << "quantum resonance: tau*hbar/(4 pi) = " << x << " is within 1e-6 of " << p << "/" << q;
      throw ConfigError(msg.str());
    }
  }
}

double QuantumParams::momentum(int index) const {
  return hbar * (static_cast<double>(k_of(index)) + quasi_momentum);
}

nlohmann::json to_json(const QuantumParams& p) {
  return {{"dim", p.dim},
          {"lambda", p.lambda},
          {"hbar", p.hbar},
          {"tau", p.tau},
          {"quasi_momentum", p.quasi_momentum}};
}

QuantumParams quantum_params_from_json(const nlohmann::json& j) {
  QuantumParams p;
  try {
    p.dim = j.at("dim").get<int>();
    p.lambda = j.at("lambda").get<double>();
    p.hbar = j.value("hbar", 1.0);
    p.tau = j.value("tau", 1.0);
    p.quasi_momentum = j.value("quasi_momentum", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("quantum parameters: ") + e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// States and observables

DensityState DensityState::from_matrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ConfigError("density matrix must be square and non-empty");
  if (hermiticity_defect(m) > kHermitianTol) throw HermiticityError("density matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > kTraceTol) throw ConfigError("density matrix trace must be 1");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue check of density matrix failed");
  if (es.eigenvalues().minCoeff() < kPositivityTol) {
    throw ConfigError("density matrix is not positive semidefinite");
  }
  return DensityState(std::move(m));
}

DensityState DensityState::pure(const Vector& psi) {
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) throw ConfigError("pure state vector has zero norm");
  return DensityState((psi * psi.adjoint()) / norm2);
}

DensityState DensityState::maximally_mixed(int dim) {
  if (dim < 1) throw ConfigError("dim must be positive");
  return DensityState(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityState DensityState::momentum_eigenstate(const QuantumParams& params, int k) {
  if (std::abs(k) > params.k_max()) throw ConfigError("momentum index outside the ladder");
  Matrix m = Matrix::Zero(params.dim, params.dim);
  m(params.index_of(k), params.index_of(k)) = 1.0;
  return DensityState(std::move(m));
}

DensityState DensityState::assume_valid(Matrix m) { return DensityState(std::move(m)); }

ObservableMatrix::ObservableMatrix(Matrix m, std::string label)
    : m_(std::move(m)), label_(std::move(label)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw ConfigError("observable must be square and non-empty");
  if (hermiticity_defect(m_) > kHermitianTol) {
    throw HermiticityError("observable '" + label_ + "' is not Hermitian");
  }
}

ObservableMatrix momentum_window_projector(const QuantumParams& params, int k_min, int k_max) {
  params.validate();
  Matrix m = Matrix::Zero(params.dim, params.dim);
  for (int i = 0; i < params.dim; ++i) {
    const int k = params.k_of(i);
    if (k >= k_min && k < k_max) m(i, i) = 1.0;
  }
  return {std::move(m), "P[" + std::to_string(k_min) + "," + std::to_string(k_max) + ")"};
}

ObservableMatrix cos_theta_observable(const QuantumParams& params) {
  params.validate();
  Vector values(params.dim);
  for (int j = 0; j < params.dim; ++j) values[j] = std::cos(kTwoPi * j / params.dim);
  return {angle_diagonal_to_momentum(values), "cos_theta"};
}

ObservableMatrix momentum_squared_observable(const QuantumParams& params) {
  params.validate();
  Matrix m = Matrix::Zero(params.dim, params.dim);
  for (int i = 0; i < params.dim; ++i) {
    const double l = params.momentum(i);
    m(i, i) = l * l;
  }
  return {std::move(m), "L2"};
}

std::vector<ObservableMatrix> default_observable_set(const QuantumParams& params) {
  const int w = params.dim / 8;
  std::vector<ObservableMatrix> out;
  out.push_back(momentum_window_projector(params, -w, w + 1));
  out.push_back(cos_theta_observable(params));
  out.push_back(momentum_squared_observable(params));
  return out;
}

// ---------------------------------------------------------------------------
// Floquet operator

Matrix kick_operator(const QuantumParams& params) {
  params.validate();
  const double kappa = params.lambda / params.hbar;
  Vector values(params.dim);
  for (int j = 0; j < params.dim; ++j) {
    values[j] = std::polar(1.0, -kappa * std::cos(kTwoPi * j / params.dim));
  }
  return angle_diagonal_to_momentum(values);
}

Vector free_phases(const QuantumParams& params) {
  params.validate();
  Vector out(params.dim);
  for (int i = 0; i < params.dim; ++i) {
    const double kb = static_cast<double>(params.k_of(i)) + params.quasi_momentum;
    const double angle = std::remainder(0.5 * params.tau * params.hbar * kb * kb, kTwoPi);
    out[i] = std::polar(1.0, -angle);
  }
  return out;
}

Vector FloquetSystem::phases(double t) const { return phases_at(phi_, t); }

FloquetSystem build_floquet(const QuantumParams& params, double gap_tol) {
  params.validate();
  if (!(gap_tol >= 0.0)) throw ConfigError("gap_tol must be >= 0");
  const int n = params.dim;

  FloquetSystem sys;
  sys.params_ = params;
  sys.gap_tol_ = gap_tol;
  sys.unitary_ = kick_operator(params) * free_phases(params).asDiagonal();

  Matrix schur = sys.unitary_;
  Matrix vectors(n, n);
  Vector eigenvalues(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, schur.data(), n, &sdim,
                                        eigenvalues.data(), vectors.data(), n);
  if (info != 0) {
    throw NumericError("Schur decomposition of the Floquet operator failed (zgees info = " +
                       std::to_string(info) + ", dim = " + std::to_string(n) + ")");
  }

  std::vector<double> phi(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) phi[static_cast<std::size_t>(k)] = wrap_phase(-std::arg(eigenvalues[k]));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return phi[static_cast<std::size_t>(a)] < phi[static_cast<std::size_t>(b)];
  });

  sys.phi_.resize(n);
  sys.basis_.resize(n, n);
  for (int k = 0; k < n; ++k) {
    sys.phi_[k] = phi[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    sys.basis_.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

  const Matrix applied = sys.unitary_ * sys.basis_;
  const Vector u = sys.phases(1.0);
  double residual = 0.0;
  for (int k = 0; k < n; ++k) {
    residual = std::max(residual, (applied.col(k) - u[k] * sys.basis_.col(k)).cwiseAbs().maxCoeff());
  }
  sys.residual_ = residual;
  if (!(residual <= kEigenResidualTol)) {
    std::ostringstream msg;
    msg << "Floquet eigensolve residual " << residual << " exceeds " << kEigenResidualTol
        << " (dim = " << n << ", lambda = " << params.lambda << ")";
    throw NumericError(msg.str());
  }

  for (int k = 0; k + 1 < n; ++k) {
    if (sys.phi_[k + 1] - sys.phi_[k] < gap_tol) sys.degenerate_.emplace_back(k, k + 1);
  }
  if (n > 1 && sys.phi_[0] + kTwoPi - sys.phi_[n - 1] < gap_tol) sys.degenerate_.emplace_back(n - 1, 0);
  return sys;
}

// ---------------------------------------------------------------------------
// Dynamics

DensityState evolve(const DensityState& rho, const FloquetSystem& system, long long n) {
  require_dim(system.dim(), rho.dim(), "evolve");
  if (n == 0) return rho;
  const Matrix& v = system.eigenbasis();
  const Vector u = system.phases(static_cast<double>(n));
  Matrix in_eig = v.adjoint() * rho.matrix() * v;
  in_eig = u.asDiagonal() * in_eig * u.conjugate().asDiagonal();
  Matrix out = v * in_eig * v.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityState::assume_valid(std::move(out));
}

Vector evolve_state(const Vector& psi, const FloquetSystem& system, long long n) {
  require_dim(system.dim(), static_cast<int>(psi.size()), "evolve_state");
  const Matrix& v = system.eigenbasis();
  const Vector a = v.adjoint() * psi;
  return v * system.phases(static_cast<double>(n)).cwiseProduct(a);
}

DensityState cesaro_limit_state(const DensityState& rho0, const FloquetSystem& system) {
  require_dim(system.dim(), rho0.dim(), "cesaro_limit_state");
  require_nondegenerate(system, "cesaro_limit_state");
  const Matrix& v = system.eigenbasis();
  const Vector populations = (v.adjoint() * rho0.matrix() * v).diagonal().real().cast<Complex>();
  Matrix out = v * populations.asDiagonal() * v.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityState::assume_valid(std::move(out));
}

double expectation(const DensityState& rho, const ObservableMatrix& o) {
  require_dim(rho.dim(), o.dim(), "expectation");
  const Complex value = rho.matrix().cwiseProduct(o.matrix().transpose()).sum();
  const double scale = std::max(1.0, o.matrix().cwiseAbs().maxCoeff());
  if (std::abs(value.imag()) >= kHermitianTol * scale) {
    std::ostringstream msg;
    msg << "expectation of '" << o.label() << "' has imaginary residue " << value.imag();
    throw HermiticityError(msg.str());
  }
  return value.real();
}

double quantum_correlation(const DensityState& rho_t, const ObservableMatrix& o,
                           const DensityState& rho_star) {
  return expectation(rho_t, o) - expectation(rho_star, o);
}

std::vector<double> correlation_at_times(const DensityState& rho0, const FloquetSystem& system,
                                         const ObservableMatrix& o,
                                         const std::vector<long long>& times) {
  require_dim(system.dim(), rho0.dim(), "correlation_at_times");
  require_dim(system.dim(), o.dim(), "correlation_at_times");
  require_nondegenerate(system, "correlation_at_times");

  // C_Q(t) = sum_{k != k'} rho_kk' O_k'k exp(-i t (phi_k - phi_k')), all in
  // the Floquet eigenbasis.
  const Matrix& v = system.eigenbasis();
  const Matrix rho_eig = v.adjoint() * rho0.matrix() * v;
  const Matrix o_eig = v.adjoint() * o.matrix() * v;
  Matrix g = rho_eig.cwiseProduct(o_eig.transpose());
  g.diagonal().setZero();

  const Eigen::Index n = system.dim();
  const auto& phi = system.quasi_energies();
  std::vector<double> out(times.size());
  for (std::size_t start = 0; start < times.size(); start += kTimeBlock) {
    const auto block = static_cast<Eigen::Index>(std::min<std::size_t>(kTimeBlock, times.size() - start));
    Matrix conj_u(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
      conj_u.col(j) = phases_at(phi, static_cast<double>(times[start + static_cast<std::size_t>(j)])).conjugate();
    }
    const Matrix y = g * conj_u;
    const Eigen::VectorXd c = conj_u.conjugate().cwiseProduct(y).colwise().sum().real().transpose();
    for (Eigen::Index j = 0; j < block; ++j) out[start + static_cast<std::size_t>(j)] = c[j];
  }
  return out;
}

CorrelationSeries correlation_series(const DensityState& rho0, const FloquetSystem& system,
                                     const ObservableMatrix& o, long long horizon,
                                     std::string state_label) {
  if (horizon < 2) throw ConfigError("correlation_series needs horizon >= 2");
  const DensityState rho_star = cesaro_limit_state(rho0, system);

  CorrelationSeries s;
  s.observable_label = o.label();
  s.state_label = std::move(state_label);
  s.equilibrium_value = expectation(rho_star, o);
  s.times.resize(static_cast<std::size_t>(horizon));
  std::iota(s.times.begin(), s.times.end(), 0LL);
  s.c_q = correlation_at_times(rho0, system, o, s.times);

  s.cesaro.resize(s.c_q.size());
  double running = 0.0;
  for (std::size_t i = 0; i < s.c_q.size(); ++i) {
    running += s.c_q[i];
    s.cesaro[i] = running / static_cast<double>(i + 1);
    s.cesaro_constant = std::max(s.cesaro_constant, static_cast<double>(i + 1) * std::abs(s.cesaro[i]));
  }
  return s;
}

Vector haar_random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector psi(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    psi[i] = Complex(re, im);
  }
  return psi / psi.norm();
}

double mixing_volume_fraction(const FloquetSystem& system, const std::vector<ObservableMatrix>& o_set,
                              std::size_t n_states, long long horizon, double tol,
                              std::uint64_t seed) {
  if (o_set.empty()) throw ConfigError("mixing_volume_fraction needs a non-empty observable set");
  if (n_states < 100) throw ConfigError("mixing_volume_fraction needs n_states >= 100");
  if (horizon < 10) throw ConfigError("mixing_volume_fraction needs horizon >= 10");
  if (!(tol >= 0.0)) throw ConfigError("tol must be >= 0");
  for (const auto& o : o_set) require_dim(system.dim(), o.dim(), "mixing_volume_fraction");
  require_nondegenerate(system, "mixing_volume_fraction");

  const Matrix& v = system.eigenbasis();
  const Eigen::Index n = system.dim();
  std::vector<Matrix> o_eig;
  std::vector<Eigen::VectorXd> o_diag;
  for (const auto& o : o_set) {
    o_eig.push_back(v.adjoint() * o.matrix() * v);
    o_diag.push_back(o_eig.back().diagonal().real());
  }

  const long long tail_start = horizon - (horizon + 9) / 10;
  std::vector<long long> tail(static_cast<std::size_t>(horizon - tail_start));
  std::iota(tail.begin(), tail.end(), tail_start);

  std::vector<unsigned char> has_limit(n_states, 0);
  parallel_for(n_states, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    const Vector a = v.adjoint() * haar_random_state(static_cast<int>(n), rng);
    const Eigen::VectorXd pop = a.cwiseAbs2();
    std::vector<double> equilibrium;
    for (const auto& d : o_diag) equilibrium.push_back(pop.dot(d));

    for (std::size_t start = 0; start < tail.size(); start += kTimeBlock) {
      const auto block = static_cast<Eigen::Index>(std::min<std::size_t>(kTimeBlock, tail.size() - start));
      Matrix at(n, block);
      for (Eigen::Index j = 0; j < block; ++j) {
        at.col(j) = a.cwiseProduct(system.phases(static_cast<double>(tail[start + static_cast<std::size_t>(j)])));
      }
      for (std::size_t oi = 0; oi < o_eig.size(); ++oi) {
        const Matrix y = o_eig[oi] * at;
        const Eigen::VectorXd values = at.conjugate().cwiseProduct(y).colwise().sum().real().transpose();
        for (Eigen::Index j = 0; j < block; ++j) {
          if (!(std::abs(values[j] - equilibrium[oi]) < tol)) return;
        }
      }
    }
    has_limit[i] = 1;
  });

  std::size_t count = 0;
  for (auto h : has_limit) count += h;
  return static_cast<double>(count) / static_cast<double>(n_states);
}

// ---------------------------------------------------------------------------
// Localization

std::vector<MomentumProbability> momentum_distribution(const DensityState& rho) {
  const int n = rho.dim();
  const int k_max = (n - 1) / 2;
  std::vector<MomentumProbability> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {i - k_max, rho.matrix()(i, i).real()};
  return out;
}

bool LocalizationFit::localized() const { return std::isfinite(length); }

LocalizationFit localization_length(const std::vector<MomentumProbability>& distribution,
                                    double bulk_fraction) {
  if (!(bulk_fraction > 0.0 && bulk_fraction <= 1.0)) throw ConfigError("bulk_fraction must lie in (0, 1]");
  double total = 0.0;
  int k_max = 0;
  for (const auto& e : distribution) {
    total += e.p;
    k_max = std::max(k_max, std::abs(e.k));
  }
  if (std::abs(total - 1.0) > 1e-8) throw ConfigError("momentum distribution is not normalized");

  const double cutoff = bulk_fraction * k_max;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& e : distribution) {
    if (std::abs(e.k) <= cutoff && e.p > 0.0) {
      xs.push_back(std::abs(e.k));
      ys.push_back(std::log(e.p));
    }
  }
  if (xs.size() < 3) throw InsufficientDataError("localization fit needs at least 3 populated bulk points");

  const double m = static_cast<double>(xs.size());
  const double x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    syy += (ys[i] - y_mean) * (ys[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("localization fit needs at least two distinct |k|");

  LocalizationFit fit;
  fit.n_points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  // Rounding in the means of a flat profile leaves |slope| ~ 1e-17.
  const bool decaying = fit.slope < -1e-12 * std::max(1.0, std::abs(y_mean));
  fit.length = decaying ? -2.0 / fit.slope : std::numeric_limits<double>::infinity();
  return fit;
}

// ---------------------------------------------------------------------------
// CSV

void write_series_csv(std::ostream& out, const CorrelationSeries& series) {
  out << "t,c_q,cesaro\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out << series.times[i] << ',' << io::format_double(series.c_q[i]) << ','
        << io::format_double(series.cesaro[i]) << '\n';
  }
}

void write_momentum_csv(std::ostream& out, const std::vector<MomentumProbability>& dist) {
  out << "k,p\n";
  for (const auto& e : dist) out << e.k << ',' << io::format_double(e.p) << '\n';
}

void write_spectrum_csv(std::ostream& out, const FloquetSystem& system) {
  out << "k,phi_k\n";
  const auto& phi = system.quasi_energies();
  for (Eigen::Index k = 0; k < phi.size(); ++k) out << k << ',' << io::format_double(phi[k]) << '\n';
}

}  // namespace ehlab::quantum
