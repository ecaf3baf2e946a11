#include "ehlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ehlab/errors.hpp"
#include "ehlab/io.hpp"

namespace ehlab::geometry {

double hs_distance_squared(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << "hs_distance: dimension mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows()
        << "x" << b.cols() << ")";
    throw ConfigError(msg.str());
  }
  return (a - b).squaredNorm();
}

double hs_distance(const Matrix& a, const Matrix& b) { return std::sqrt(hs_distance_squared(a, b)); }

Matrix RegionProjector::matrix() const {
  Matrix m = Matrix::Zero(dim, dim);
  for (int i : indices) m(i, i) = 1.0;
  return m;
}

RegionProjector make_region_projector(int dim, std::vector<int> indices) {
  if (dim < 1) throw ConfigError("projector dimension must be positive");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw ConfigError("projector indices must be distinct");
  }
  if (!indices.empty() && (indices.front() < 0 || indices.back() >= dim)) {
    throw ConfigError("projector index outside [0, dim)");
  }
  if (indices.empty()) throw EmptyRegionError("projector selects no basis index");
  RegionProjector p;
  p.dim = dim;
  p.mu_rank = indices.size();
  p.indices = std::move(indices);
  return p;
}

RegionProjector region_projector_from_cells(const classical::CellSet& cells,
                                            const quantum::QuantumParams& params) {
  params.validate();
  std::vector<int> selected;
  for (int i = 0; i < params.dim; ++i) {
    const double p = params.momentum(i);
    const bool inside = std::any_of(cells.begin(), cells.end(), [&](const classical::Cell& c) {
      return p >= c.p_min && p < c.p_max;
    });
    if (inside) selected.push_back(i);
  }
  if (selected.empty()) {
    throw EmptyRegionError("no ladder momentum falls inside the cell set (dim = " +
                           std::to_string(params.dim) + ")");
  }
  return make_region_projector(params.dim, std::move(selected));
}

IdentityCheck verify_theorem2(const RegionProjector& projector) {
  const int n = projector.dim;
  const double mu = static_cast<double>(projector.mu_rank);
  const Matrix rho_a = projector.matrix() / mu;
  const Matrix mixed = Matrix::Identity(n, n) / static_cast<double>(n);

  IdentityCheck out;
  out.dim = n;
  out.mu = projector.mu_rank;
  out.d2 = hs_distance_squared(rho_a, mixed);
  out.residual = (out.d2 + 1.0 / static_cast<double>(n)) * mu - 1.0;
  return out;
}

double closed_form_d2(std::size_t mu, int dim) {
  return 1.0 / static_cast<double>(mu) - 1.0 / static_cast<double>(dim);
}

void write_identity_csv(std::ostream& out, const std::vector<IdentityCheck>& rows) {
  out << "N,mu,d2,residual\n";
  for (const auto& r : rows) {
    out << r.dim << ',' << r.mu << ',' << io::format_double(r.d2) << ','
        << io::format_double(r.residual) << '\n';
  }
}

}  // namespace ehlab::geometry
