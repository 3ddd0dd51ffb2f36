#include "fsi/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

using Triplet = Eigen::Triplet<double>;

void append_block(std::vector<Triplet>& t, const SparseMatrix& m, Index row0, Index col0,
                  double scale) {
  for (Index col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it)
      t.emplace_back(row0 + it.row(), col0 + col, scale * it.value());
}

}  // namespace

Discretization::Discretization(const GeometryConfig& grid, double rho)
    : topology(grid),
      fluid(assemble_fluid_ops(topology)),
      plate(assemble_plate_ops(topology, rho)),
      metric(assemble_energy_metric(topology, fluid, plate)) {
  const Index nu = fluid_size(), np = plate_size(), nx = state_size();
  const Index nf = topology.num_faces();

  std::vector<Triplet> l;
  for (Index s = 0; s < nu; ++s) l.emplace_back(topology.interior_faces()[s], s, 1.0);
  const SparseMatrix& e = plate.interface;
  for (Index col = 0; col < e.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(e, col); it; ++it)
      l.emplace_back(topology.omega_faces()[it.row()], nu + np + col, it.value());
  lift.resize(nf, nx);
  lift.setFromTriplets(l.begin(), l.end());

  const SparseMatrix kp = plate.node_area * plate.bilaplacian;
  std::vector<Triplet> skew;
  append_block(skew, kp, nu, nu + np, 1.0);
  append_block(skew, kp, nu + np, nu, -1.0);
  SparseMatrix coupling(nx, nx);
  coupling.setFromTriplets(skew.begin(), skew.end());
  form = SparseMatrix(coupling - SparseMatrix(lift.transpose() * fluid.stiffness * lift));
  form.prune(0.0);

  constraint = fluid.cell_volume * (fluid.divergence * lift);
  constraint.prune(0.0);

  inertia_solver.compute(plate.node_area * plate.inertia);
  bilaplacian_solver.compute(plate.bilaplacian);
  if (inertia_solver.info() != Eigen::Success || bilaplacian_solver.info() != Eigen::Success)
    throw NumericalError("plate operator factorization failed");
}

VectorXd Discretization::traction(const VectorXd& full_faces) const {
  const VectorXd flux = fluid.omega_trace * (fluid.stiffness * full_faces);
  return (plate.interface.transpose() * flux) / fluid.face_area;
}

double Discretization::constraint_residual(const VectorXd& x) const {
  return constraint_residual(VectorXc(x.cast<Complex>()));
}

double Discretization::constraint_residual(const VectorXc& x) const {
  const double scale = std::max(x.cwiseAbs().maxCoeff(), 1e-300);
  const VectorXc div = apply<Complex>(constraint, x) / (fluid.cell_volume / fluid.h);
  const double mean_w1 = std::abs(x.segment(fluid_size(), plate_size()).mean());
  return std::max(div.cwiseAbs().maxCoeff(), mean_w1) / scale;
}

DiscretizationPtr make_discretization(const GeometryConfig& grid, double rho) {
  return std::make_shared<const Discretization>(grid, rho);
}

}  // namespace fsi
