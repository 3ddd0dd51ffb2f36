#pragma once

#include <memory>

#include "fsi/discretization.hpp"
#include "fsi/pressure.hpp"
#include "fsi/state.hpp"

namespace fsi {

/// Fluid-structure generator on the constrained state space. The constraint
/// set (div u = 0 per cell, Omega faces slaved to w2, mean(w1) = 0) is
/// eliminated with an M-orthonormal null-space basis N, so M_red = I and
/// A_red = N^T F N.
struct Generator {
  DiscretizationPtr disc;
  std::shared_ptr<const PressureMaps> maps;
  MatrixXd basis;  // N, state size x reduced size
  MatrixXd a_red;
  MatrixXd m_red;

  double rho() const { return disc->rho(); }
  Index reduced_size() const { return basis.cols(); }

  /// Reduced coordinates of a constrained stacked state, z = N^T M x.
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> reduce(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    return basis.transpose().template cast<Scalar>() * apply<Scalar>(disc->metric.mass, x);
  }
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expand(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z) const {
    return basis.template cast<Scalar>() * z;
  }
  template <typename Scalar>
  State<Scalar> state_of(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z) const {
    return State<Scalar>::from_stacked(disc->topology.config(), disc->fluid_size(),
                                       disc->plate_size(), expand<Scalar>(z));
  }
  /// ||grad_h u||^2 for a stacked state (Omega faces included).
  double dissipation(const VectorXd& x) const;
};

/// Expected reduced dimension: interior faces + 2 plate sizes - cells - 1.
Index expected_reduced_size(const Discretization& disc);

/// Builds N, A_red and M_red. Checks dissipativity on 100 random reduced
/// vectors and throws NumericalError on a relative violation above 1e-8.
Generator assemble_generator(DiscretizationPtr disc, std::shared_ptr<const PressureMaps> maps);
Generator assemble_generator(const GeometryConfig& grid, double rho);

/// M-orthogonal projection onto the constrained space.
RealState project_to_state(const Generator& gen, const RealState& raw);
ComplexState project_to_state(const Generator& gen, const ComplexState& raw);

/// Literal block action (Delta u - grad p, w2, P^{-1}(-Delta^2 w1 - tau + p|_Omega))
/// with p = G1 w1 + G2 u, projected back onto the constrained space. The
/// constraint residual before projection is written to `projection_residual`.
RealState apply_generator(const Generator& gen, const RealState& s,
                          double* projection_residual = nullptr);
ComplexState apply_generator(const Generator& gen, const ComplexState& s,
                             double* projection_residual = nullptr);

}  // namespace fsi
