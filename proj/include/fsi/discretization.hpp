#pragma once

#include <memory>

#include <Eigen/SparseCholesky>

#include "fsi/operators.hpp"

namespace fsi {

/// Everything that depends only on (grid, rho): topology, operators, energy
/// metric and the constrained variational form. State vectors are stacked as
/// x = [u on interior faces; w1; w2].
struct Discretization {
  GridTopology topology;
  FluidOperators fluid;
  PlateOperators plate;
  EnergyMetric metric;
  /// Form F with M x' = F x + C^T p. Fluid block -K, Omega faces slaved to
  /// E w2, plate stiffness h^{d-1} Delta^2_h.
  SparseMatrix form;
  /// Cell rows of the constraint, h^d * div of the full face field.
  SparseMatrix constraint;
  /// Full face field from state: interior faces copied, Omega faces E w2, S zero.
  SparseMatrix lift;
  /// Sparse LDLT of h^{d-1} P_rho and of the bilaplacian, shared by all users.
  Eigen::SimplicialLDLT<SparseMatrix> inertia_solver;
  Eigen::SimplicialLDLT<SparseMatrix> bilaplacian_solver;

  Discretization(const GeometryConfig& grid, double rho);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  double rho() const { return plate.rho; }
  Index fluid_size() const { return metric.fluid_size; }
  Index plate_size() const { return metric.plate_size; }
  Index state_size() const { return metric.size(); }

  /// Discrete normal viscous traction on the plate nodes, h^{1-d} E^T (K U)_Omega.
  VectorXd traction(const VectorXd& full_faces) const;
  /// Relative violation of div u = 0 and mean(w1) = 0 for a stacked state.
  double constraint_residual(const VectorXd& x) const;
  double constraint_residual(const VectorXc& x) const;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(const GeometryConfig& grid, double rho);

}  // namespace fsi
