#include "fsi/stokes.hpp"

#include <vector>

#include "fsi/errors.hpp"

namespace fsi {

StokesSolver::StokesSolver(DiscretizationPtr disc) : disc_(std::move(disc)) {
  const Discretization& d = *disc_;
  const auto& topo = d.topology;
  const Index nu = d.fluid_size(), nc = topo.num_cells();
  const double volume = d.fluid.cell_volume;

  // Rows of K belonging to interior faces: boundary_stiffness_ = K restricted.
  boundary_stiffness_ = -volume * d.fluid.laplacian;

  std::vector<Eigen::Triplet<double>> t;
  for (Index col = 0; col < boundary_stiffness_.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(boundary_stiffness_, col); it; ++it) {
      const Index slot = topo.interior_slot(col);
      if (slot >= 0) t.emplace_back(it.row(), slot, -it.value());
    }
  const SparseMatrix cu = d.constraint.leftCols(nu);
  for (Index col = 0; col < cu.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(cu, col); it; ++it) {
      t.emplace_back(nu + it.row(), col, it.value());
      t.emplace_back(col, nu + it.row(), it.value());
    }
  for (Index c = 0; c < nc; ++c) {
    t.emplace_back(nu + c, nu + nc, 1.0);
    t.emplace_back(nu + nc, nu + c, 1.0);
  }
  SparseMatrix kkt(nu + nc + 1, nu + nc + 1);
  kkt.setFromTriplets(t.begin(), t.end());
  lu_.compute(kkt);
  if (lu_.info() != Eigen::Success) throw NumericalError("Stokes saddle-point factorization failed");
}

VectorXd StokesSolver::omega_data(const VectorXd& w) const {
  const Discretization& d = *disc_;
  VectorXd b = VectorXd::Zero(d.topology.num_faces());
  const VectorXd faces = d.plate.interface * w;
  for (Index k = 0; k < faces.size(); ++k) b[d.topology.omega_faces()[k]] = faces[k];
  return b;
}

StokesSolver::Result StokesSolver::solve(const VectorXd& force, const VectorXd& boundary) const {
  const Discretization& d = *disc_;
  const auto& topo = d.topology;
  const Index nu = d.fluid_size(), nc = topo.num_cells();
  if (force.size() != nu || boundary.size() != topo.num_faces())
    throw ConfigError("Stokes solve: data has the wrong size");
  VectorXd b = boundary;
  for (Index f : topo.interior_faces()) b[f] = 0.0;

  VectorXd rhs(nu + nc + 1);
  rhs.head(nu) = d.fluid.cell_volume * force + boundary_stiffness_ * b;
  rhs.segment(nu, nc) = -d.fluid.cell_volume * (d.fluid.divergence * b);
  rhs[nu + nc] = 0.0;
  const VectorXd sol = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !sol.allFinite()) throw NumericalError("Stokes solve failed");

  Result r;
  r.u = sol.head(nu);
  r.q = sol.segment(nu, nc);
  r.flux_defect = sol[nu + nc];
  r.full = b;
  for (Index s = 0; s < nu; ++s) r.full[topo.interior_faces()[s]] = r.u[s];
  return r;
}

}  // namespace fsi
