#pragma once

#include <vector>

#include <Eigen/SparseCholesky>

#include "fsi/discretization.hpp"
#include "fsi/state.hpp"

namespace fsi {

/// Discrete harmonic extension with a Robin closure on Omega and a Neumann
/// closure on S:
///   Delta f = 0 in O,  df/dnu + P_rho^{-1} f = g on Omega,  df/dnu = g~ on S.
/// The assembled operator is C M^{-1} C^T of the constrained form, so the
/// pressure it produces is exactly the multiplier of the saddle-point system.
class RobinSolver {
 public:
  explicit RobinSolver(DiscretizationPtr disc);

  double rho() const { return disc_->rho(); }
  const SparseMatrix& matrix() const { return matrix_; }
  const Discretization& discretization() const { return *disc_; }

  /// g_omega on plate nodes, g_s on S faces (s_faces() order).
  VectorXd solve(const VectorXd& g_omega, const VectorXd& g_s) const;
  /// Same with the Omega data given per Omega face.
  VectorXd solve_faces(const VectorXd& g_omega_faces, const VectorXd& g_s) const;
  VectorXd solve_cells(const VectorXd& rhs) const;
  VectorXd rhs_faces(const VectorXd& g_omega_faces, const VectorXd& g_s) const;

  /// Cells that touch no boundary face; the Laplace equation holds there.
  const std::vector<Index>& interior_cells() const { return interior_cells_; }
  /// Neumann Laplacian times h^d, the fluid part of matrix().
  const SparseMatrix& neumann() const { return neumann_; }

 private:
  DiscretizationPtr disc_;
  SparseMatrix matrix_;
  SparseMatrix neumann_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
  std::vector<Index> s_face_cells_;
  std::vector<Index> interior_cells_;
};

/// Boundary data of the discrete vector Laplacian that feeds G2.
struct BoundaryTraces {
  VectorXd omega;     // Delta u . nu per Omega face
  VectorXd s;         // Delta u . nu per S face
  VectorXd traction;  // normal viscous traction on plate nodes
  double interior_residual = 0.0;  // max |h^d div Delta u| on interior cells
};

/// p = G1(w1) + G2(u).
class PressureMaps {
 public:
  explicit PressureMaps(DiscretizationPtr disc);

  const RobinSolver& robin() const { return robin_; }
  const Discretization& discretization() const { return robin_.discretization(); }

  VectorXd g1(const VectorXd& w1) const;
  /// Takes the full face field (Omega faces carry the plate velocity).
  VectorXd g2(const VectorXd& full_faces) const;
  BoundaryTraces traces(const VectorXd& full_faces) const;

 private:
  RobinSolver robin_;
  std::vector<Index> omega_of_cell_;  // Omega slot above a top cell, or -1
  std::vector<std::vector<Index>> s_of_cell_;
};

/// Pressure of a constrained state. Throws ConfigError if the state violates
/// the divergence or mean constraints.
VectorXd pressure_from_state(const PressureMaps& maps, const RealState& s);
VectorXc pressure_from_state(const PressureMaps& maps, const ComplexState& s);

/// sqrt(||p||^2 + ||grad_h p||^2) with the cell-to-cell gradient.
double pressure_h1_norm(const RobinSolver& robin, const VectorXd& p);

}  // namespace fsi
