#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "fsi/generator.hpp"

namespace fsi {

/// Solves A^T X + X A + Q = 0 (Bartels-Stewart on the complex Schur form).
MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q);

struct CareResult {
  MatrixXd p;
  double residual = 0.0;  // ||A^T P + P A - P G P + Q||_F / ||Q||_F
  int iterations = 0;
  std::vector<double> history;
};

/// Continuous algebraic Riccati equation
///   A^T P + P A - P B W^{-1} B^T P + Q = 0,  W = u_weight * I,
/// by Newton-Kleinman from a stabilizing initial guess (zero when A is
/// stable). Throws NumericalError if the relative residual does not reach `tol`.
CareResult solve_care(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, double u_weight = 1.0,
                      double tol = 1e-10, const MatrixXd* initial = nullptr);

/// Stable invariant subspace of the Hamiltonian matrix; independent check of
/// solve_care at small sizes.
MatrixXd care_by_hamiltonian(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                             double u_weight = 1.0);

enum class ControlKind { point_plate, boundary_normal };

struct ControlSetup {
  ControlKind kind = ControlKind::point_plate;
  /// Point control: locations on Omega (d-1 coordinates each) and weights.
  std::vector<std::array<double, 2>> locations;
  std::vector<double> weights;
  std::vector<Index> nodes;       // nearest plate node per location
  /// Boundary control: Sigma as indices into s_faces().
  std::vector<Index> sigma;
  /// Discrete deltas a_j delta_j on plate nodes, before P^{-1} (point control)
  /// or the plate load of the Stokes lift per unit face value (boundary).
  MatrixXd plate_forcing;         // plate nodes x controls
  MatrixXd injection;             // P^{-1} plate_forcing
  MatrixXd b;                     // reduced state x controls
  MatrixXd observation;           // R, rows x reduced
  double u_weight = 1.0;          // control inner product (g, g)_U = u_weight g^T g
  /// Boundary control only: the lifted normal data on all faces per unit g_k.
  MatrixXd boundary_data;         // faces x controls

  Index controls() const { return b.cols(); }
  /// <g, B* z>_U = <B g, z>_M, so B* z = B^T z / u_weight.
  VectorXd adjoint(const VectorXd& z) const { return b.transpose() * z / u_weight; }
};

/// Discrete delta at the plate node nearest to each location (scaled 1/h^{d-1}),
/// injected into the w2 equation through P_rho^{-1}.
ControlSetup build_point_control(const Generator& gen, const std::vector<std::array<double, 2>>& xi,
                                 const std::vector<double>& a);

/// Normal velocity control on Sigma (indices into s_faces()). The net flux
/// area * sum g is removed uniformly over the remaining S faces, so the flux
/// through Sigma is exactly area * g. The data is lifted by a stationary
/// Stokes solve; B carries the lift's pressure and traction load on the plate.
ControlSetup build_boundary_control(const Generator& gen, const std::vector<Index>& sigma);

/// Observation restricted to the plate components of the reduced state.
MatrixXd plate_observation(const Generator& gen);

struct RiccatiSolution {
  MatrixXd p;                 // infinite horizon, or P(0) for finite horizon
  MatrixXd gain;              // K = -W^{-1} B^T P
  double residual = 0.0;
  double open_loop_abscissa = 0.0;
  double closed_loop_abscissa = 0.0;
  /// Finite horizon: P(t_k) on the stored grid, t ascending.
  std::vector<double> times;
  std::vector<MatrixXd> trajectory;
};

/// Infinite horizon when horizon <= 0, otherwise a backward implicit-midpoint
/// Riccati sweep with `steps` steps and P(T) = 0.
RiccatiSolution solve_lqr(const Generator& gen, const ControlSetup& setup, double horizon = 0.0,
                          int steps = 400);

/// Rank of the orthogonalized Krylov blocks [B, AB, ...] after each block.
std::vector<Index> krylov_rank_growth(const MatrixXd& a, const MatrixXd& b, double tol = 1e-10);

struct CostResult {
  double closed_loop = 0.0;
  double zero_control = 0.0;
};

/// Integrates |R z|^2 + (g, g)_U along the closed loop z' = (A + B K) z and
/// along the uncontrolled system with implicit midpoint on [0, horizon].
CostResult simulate_costs(const Generator& gen, const ControlSetup& setup,
                          const RiccatiSolution& sol, const VectorXd& z0, double horizon, double dt);

/// CSV "t,trace_P" of a finite-horizon sweep.
void write_riccati_csv(std::ostream& out, const RiccatiSolution& sol);

}  // namespace fsi
