#pragma once

#include <Eigen/SparseLU>

#include "fsi/discretization.hpp"

namespace fsi {

/// Stationary Stokes problem on the staggered grid:
///   Delta_h U - grad q = f on interior faces,  div U = 0,  U = b on boundary faces,
/// with q normalized to zero mean. The saddle-point matrix is bordered by one
/// extra unknown that absorbs the net boundary flux; it is zero for
/// compatible data and is reported as `flux_defect`.
class StokesSolver {
 public:
  explicit StokesSolver(DiscretizationPtr disc);

  struct Result {
    VectorXd u;      // interior faces
    VectorXd full;   // all faces, boundary data included
    VectorXd q;      // cells, mean zero
    double flux_defect = 0.0;
  };

  /// `boundary` is a full face vector; only its boundary entries are read.
  Result solve(const VectorXd& force, const VectorXd& boundary) const;

  /// Full face vector carrying E w on Omega and zero elsewhere.
  VectorXd omega_data(const VectorXd& w) const;

 private:
  DiscretizationPtr disc_;
  SparseMatrix boundary_stiffness_;  // interior rows x all faces
  Eigen::SparseLU<SparseMatrix> lu_;
};

}  // namespace fsi
