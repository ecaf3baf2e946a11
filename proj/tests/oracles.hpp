#pragma once

// Independent reference computations used only by the tests. None of these
// share code paths with the library routines they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ehlab/classical.hpp"
#include "ehlab/quantum.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (-i)^n for any integer n.
inline Complex minus_i_pow(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

inline double bessel_j(long n, double x) {
  const double v = std::cyl_bessel_j(static_cast<double>(std::labs(n)), x);
  return (n < 0 && (n % 2 != 0)) ? -v : v;
}

// <m| exp(-i kappa cos theta) |n> on an N-site momentum ring: the Bessel
// expansion exp(-i kappa cos theta) = sum_n (-i)^n J_n(kappa) e^{i n theta},
// folded onto residues mod N.
inline Complex bessel_kick_element(long m, long n, double kappa, long N) {
  const long d = m - n;
  const long reach = static_cast<long>(kappa) + 60;
  Complex sum = 0.0;
  for (long q = -(reach / N + 2); q <= reach / N + 2; ++q) {
    const long order = d + q * N;
    if (std::labs(order) > reach) continue;
    sum += minus_i_pow(order) * bessel_j(order, kappa);
  }
  return sum;
}

// Largest Lyapunov exponent from two nearby orbits whose separation is
// rescaled to d0 after every step (Benettin's method), torus differences
// taken as the minimal image.
inline double two_orbit_lyapunov(ehlab::classical::PhasePoint x0, const ehlab::classical::MapParams& params,
                                 std::size_t n_steps, double d0 = 1e-9) {
  auto diff = [](double a, double b) { return std::remainder(a - b, kTwoPi); };
  auto wrap = [](double a) { return a - kTwoPi * std::floor(a / kTwoPi); };
  auto step = [&](double& th, double& p) {
    p = wrap(p + params.lambda * std::sin(th));
    th = wrap(th + params.tau * p);
  };
  double th = x0.theta, p = x0.p;
  double th2 = wrap(th + d0 / std::sqrt(2.0)), p2 = wrap(p + d0 / std::sqrt(2.0));
  double sum = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    step(th, p);
    step(th2, p2);
    const double dth = diff(th2, th), dp = diff(p2, p);
    const double d = std::hypot(dth, dp);
    sum += std::log(d / d0);
    th2 = wrap(th + dth * d0 / d);
    p2 = wrap(p + dp * d0 / d);
  }
  return sum / static_cast<double>(n_steps);
}

// Largest growth of a 1e-9 separation over n steps, used to find regular
// seeds by scanning: on a torus the separation grows at most linearly.
inline double separation_growth(ehlab::classical::PhasePoint x0, const ehlab::classical::MapParams& params,
                                std::size_t n_steps) {
  auto wrap = [](double a) { return a - kTwoPi * std::floor(a / kTwoPi); };
  double th = x0.theta, p = x0.p, th2 = x0.theta + 1e-9, p2 = x0.p;
  double worst = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    p = wrap(p + params.lambda * std::sin(th));
    th = wrap(th + params.tau * p);
    p2 = wrap(p2 + params.lambda * std::sin(th2));
    th2 = wrap(th2 + params.tau * p2);
    worst = std::max(worst, std::hypot(std::remainder(th2 - th, kTwoPi), std::remainder(p2 - p, kTwoPi)));
  }
  return worst / 1e-9;
}

// Brute-force scan of a grid of initial conditions at low lambda; returns the
// point whose nearby orbit separates the least.
inline ehlab::classical::PhasePoint most_regular_seed(const ehlab::classical::MapParams& params, int side,
                                                      std::size_t n_steps) {
  ehlab::classical::PhasePoint best{0.0, 0.0};
  double best_growth = INFINITY;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      const ehlab::classical::PhasePoint x{(i + 0.5) * kTwoPi / side, (j + 0.5) * kTwoPi / side};
      const double g = separation_growth(x, params, n_steps);
      if (g < best_growth) {
        best_growth = g;
        best = x;
      }
    }
  }
  return best;
}

inline long double cubic_ld(long double lambda, long double lambda_c, long double mu_c) {
  const long double x = lambda / lambda_c;
  return mu_c * (1.5L * x * x - 0.5L * x * x * x);
}

inline Complex trace_product(const Matrix& a, const Matrix& b) {
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) sum += a(i, j) * b(j, i);
  }
  return sum;
}

inline double hs_distance(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) sum += std::norm(a(i, j) - b(i, j));
  }
  return std::sqrt(sum);
}

inline Matrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return scale * 0.5 * (a + a.adjoint());
}

inline Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(g(rng), g(rng));
  return v / v.norm();
}

// Random density matrix A A^dagger / Tr with complex Gaussian A.
inline Matrix random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Matrix r = a * a.adjoint();
  return r / r.trace().real();
}

// C_Q(t) = sum_{k != k'} rho_kk' exp(-i t (phi_k - phi_k')) O_k'k, written as
// an explicit double loop over the Floquet eigenbasis.
inline double eigenbasis_correlation(const Matrix& rho0, const ehlab::quantum::FloquetSystem& sys,
                                     const Matrix& o, long long t) {
  const Matrix& v = sys.eigenbasis();
  const Matrix r = v.adjoint() * rho0 * v;
  const Matrix m = v.adjoint() * o * v;
  const auto& phi = sys.quasi_energies();
  Complex sum = 0.0;
  for (Eigen::Index k = 0; k < r.rows(); ++k) {
    for (Eigen::Index kp = 0; kp < r.cols(); ++kp) {
      if (k == kp) continue;
      const double angle = -std::fmod(static_cast<double>(t) * (phi[k] - phi[kp]), kTwoPi);
      sum += r(k, kp) * std::polar(1.0, angle) * m(kp, k);
    }
  }
  return sum.real();
}

// |sum_{j=0}^{n} c_q(j)| <= sum_{k != k'} 2 |rho_kk' O_k'k| / |1 - e^{-i Delta}|.
inline double geometric_sum_bound(const Matrix& rho0, const ehlab::quantum::FloquetSystem& sys, const Matrix& o) {
  const Matrix& v = sys.eigenbasis();
  const Matrix r = v.adjoint() * rho0 * v;
  const Matrix m = v.adjoint() * o * v;
  const auto& phi = sys.quasi_energies();
  double bound = 0.0;
  for (Eigen::Index k = 0; k < r.rows(); ++k) {
    for (Eigen::Index kp = 0; kp < r.cols(); ++kp) {
      if (k == kp) continue;
      const double gap = std::abs(1.0 - std::polar(1.0, -(phi[k] - phi[kp])));
      bound += 2.0 * std::abs(r(k, kp) * m(kp, k)) / gap;
    }
  }
  return bound;
}

// Long-time variance of (rho(t)|O) when all gaps phi_k - phi_k' are distinct.
inline double dephasing_variance(const Matrix& rho0, const ehlab::quantum::FloquetSystem& sys, const Matrix& o) {
  const Matrix& v = sys.eigenbasis();
  const Matrix r = v.adjoint() * rho0 * v;
  const Matrix m = v.adjoint() * o * v;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < r.rows(); ++k) {
    for (Eigen::Index kp = 0; kp < r.cols(); ++kp) {
      if (k != kp) sum += std::norm(r(k, kp)) * std::norm(m(k, kp));
    }
  }
  return sum;
}

// F^n rho F^-n by repeated multiplication.
inline Matrix evolve_by_powers(const Matrix& rho, const Matrix& f, int n) {
  Matrix out = rho;
  for (int i = 0; i < n; ++i) out = f * out * f.adjoint();
  return out;
}

}  // namespace oracle
