#pragma once

// Hilbert–Schmidt distances and the identity tying the rank of a region
// projector to its distance from the maximally mixed state:
//   (d^2(I_A / mu, 1/N) + 1/N) mu = 1,  mu = Tr(I_A).

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ehlab/classical.hpp"
#include "ehlab/quantum.hpp"

namespace ehlab::geometry {

using quantum::Matrix;

/// sqrt(Tr((A - B)(A - B)^dagger)). Throws ConfigError on a shape mismatch.
double hs_distance(const Matrix& a, const Matrix& b);
double hs_distance_squared(const Matrix& a, const Matrix& b);

/// Diagonal 0/1 projector on a subset of the momentum ladder.
struct RegionProjector {
  int dim = 0;
  /// Sorted, distinct ladder indices in [0, dim).
  std::vector<int> indices;
  /// Tr(I_A) = |indices|.
  std::size_t mu_rank = 0;

  double mu_normalized() const { return static_cast<double>(mu_rank) / static_cast<double>(dim); }
  Matrix matrix() const;
};

/// Validates indices (in range, distinct, non-empty) and fills mu_rank.
RegionProjector make_region_projector(int dim, std::vector<int> indices);

/// Selects every ladder index whose momentum hbar (k + beta) falls into the
/// p-interval [p_min, p_max) of some cell; theta bounds are ignored. Throws
/// EmptyRegionError if nothing is selected.
RegionProjector region_projector_from_cells(const classical::CellSet& cells,
                                            const quantum::QuantumParams& params);

struct IdentityCheck {
  int dim = 0;
  std::size_t mu = 0;
  double d2 = 0.0;
  /// (d2 + 1/N) mu - 1
  double residual = 0.0;
};

/// Builds rho_A = I_A / mu and the maximally mixed state as dense matrices and
/// evaluates the identity's residual.
IdentityCheck verify_theorem2(const RegionProjector& projector);

/// Closed form 1/mu - 1/N.
double closed_form_d2(std::size_t mu, int dim);

/// N,mu,d2,residual
void write_identity_csv(std::ostream& out, const std::vector<IdentityCheck>& rows);

}  // namespace ehlab::geometry
