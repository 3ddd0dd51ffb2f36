#pragma once

#include <complex>
#include <type_traits>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fsi/geometry.hpp"

namespace fsi {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// Real sparse operator applied to a real or complex dense vector.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const SparseMatrix& a,
                                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return a * x;
  } else {
    const VectorXd re = a * x.real();
    const VectorXd im = a * x.imag();
    return re.cast<Scalar>() + Scalar(0, 1) * im.cast<Scalar>();
  }
}

/// Fluid operators on the staggered grid. All face-indexed operators act on
/// the full face set (interior, S and Omega faces); the state only carries the
/// interior faces, Omega faces are slaved to the plate velocity and S faces
/// are zero.
struct FluidOperators {
  double h = 0.0;
  int dim = 2;
  /// Dirichlet form: U^T K U = ||grad_h u||^2 (quadrature included). Tangential
  /// walls use ghost reflection (u_ghost = -u), i.e. u.tau = 0 on S and Omega.
  SparseMatrix stiffness;
  /// Cell divergence, cells x faces, (1/h) * sum of outgoing face values.
  SparseMatrix divergence;
  /// Centred gradient on interior faces, interior faces x cells.
  SparseMatrix gradient;
  /// Vector Laplacian on interior faces: -h^{-d} K restricted to interior rows.
  SparseMatrix laplacian;
  /// Selection of the normal velocity on Omega faces and on S faces.
  SparseMatrix omega_trace;
  SparseMatrix s_trace;
  double cell_volume = 0.0;  // h^d
  double face_area = 0.0;    // h^{d-1}
};

FluidOperators assemble_fluid_ops(const GridTopology& topology);

/// Plate operators on the interior vertices of Omega.
struct PlateOperators {
  double h = 0.0;
  int plate_dim = 1;
  double rho = 0.0;
  SparseMatrix dirichlet_laplacian;   // A_D = -Delta_h, homogeneous Dirichlet
  SparseMatrix inertia;               // P_rho = I + rho A_D
  /// Laplacian evaluated on every vertex of Omega (boundary vertices included)
  /// with the clamped closure w = 0 on the edge and mirrored ghosts.
  SparseMatrix boundary_laplacian;
  VectorXd trapezoid_weights;         // per vertex of Omega, boundary halved
  SparseMatrix bilaplacian;           // Delta^2_h = L_b^T W L_b
  /// Omega faces x plate nodes: face value = average of its corner nodes.
  SparseMatrix interface;
  double node_area = 0.0;  // h^{d-1}

  Eigen::Index size() const { return inertia.rows(); }
  VectorXd mean_projection(const VectorXd& w) const;
  double mean(const VectorXd& w) const { return w.mean(); }
};

PlateOperators assemble_plate_ops(const GridTopology& topology, double rho);

/// Block mass matrix realizing the energy inner product on (u, w1, w2):
/// ||u||^2_O + ||Delta_h w1||^2 + (P_rho w2, w2).
struct EnergyMetric {
  GeometryConfig grid;
  double rho = 0.0;
  Eigen::Index fluid_size = 0;
  Eigen::Index plate_size = 0;
  SparseMatrix mass;

  Eigen::Index size() const { return fluid_size + 2 * plate_size; }
};

EnergyMetric assemble_energy_metric(const GridTopology& topology, const FluidOperators& fluid,
                                    const PlateOperators& plate);

}  // namespace fsi
