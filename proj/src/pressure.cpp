#include "fsi/pressure.hpp"

#include <cmath>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

Index cell_of_boundary_face(const GridTopology& topo, Index face) {
  const int c = topo.face_component(face);
  auto idx = topo.face_multi_index(face);
  if (idx[c] == topo.n()) --idx[c];
  return topo.cell_index(idx);
}

}  // namespace

RobinSolver::RobinSolver(DiscretizationPtr disc) : disc_(std::move(disc)) {
  const Discretization& d = *disc_;
  const Index nu = d.fluid_size(), np = d.plate_size();
  const SparseMatrix cu = d.constraint.leftCols(nu);
  const SparseMatrix cw = d.constraint.rightCols(np);
  neumann_ = (cu * SparseMatrix(cu.transpose())) / d.fluid.cell_volume;
  const MatrixXd pinv_cwt = d.inertia_solver.solve(MatrixXd(cw.transpose()));
  const SparseMatrix robin_part = (MatrixXd(cw) * pinv_cwt).sparseView();
  matrix_ = neumann_ + robin_part;
  matrix_.makeCompressed();
  solver_.compute(matrix_);
  if (solver_.info() != Eigen::Success) throw NumericalError("Robin operator is singular");

  const auto& topo = d.topology;
  for (Index f : topo.s_faces()) s_face_cells_.push_back(cell_of_boundary_face(topo, f));
  std::vector<bool> touches(topo.num_cells(), false);
  for (Index c : s_face_cells_) touches[c] = true;
  for (Index c : topo.omega_face_cells()) touches[c] = true;
  for (Index c = 0; c < topo.num_cells(); ++c)
    if (!touches[c]) interior_cells_.push_back(c);
}

VectorXd RobinSolver::rhs_faces(const VectorXd& g_omega_faces, const VectorXd& g_s) const {
  const auto& topo = disc_->topology;
  if (g_omega_faces.size() != static_cast<Index>(topo.omega_faces().size()) ||
      g_s.size() != static_cast<Index>(topo.s_faces().size()))
    throw ConfigError("robin_solve: boundary data has the wrong size");
  const double area = disc_->fluid.face_area;
  VectorXd rhs = VectorXd::Zero(topo.num_cells());
  for (Index k = 0; k < g_omega_faces.size(); ++k)
    rhs[topo.omega_face_cells()[k]] += area * g_omega_faces[k];
  for (Index k = 0; k < g_s.size(); ++k) rhs[s_face_cells_[k]] += area * g_s[k];
  return rhs;
}

VectorXd RobinSolver::solve_cells(const VectorXd& rhs) const {
  VectorXd f = solver_.solve(rhs);
  if (solver_.info() != Eigen::Success || !f.allFinite())
    throw NumericalError("Robin solve failed");
  return f;
}

VectorXd RobinSolver::solve_faces(const VectorXd& g_omega_faces, const VectorXd& g_s) const {
  return solve_cells(rhs_faces(g_omega_faces, g_s));
}

VectorXd RobinSolver::solve(const VectorXd& g_omega, const VectorXd& g_s) const {
  if (g_omega.size() != disc_->plate_size())
    throw ConfigError("robin_solve: Omega data must live on plate nodes");
  return solve_faces(disc_->plate.interface * g_omega, g_s);
}

PressureMaps::PressureMaps(DiscretizationPtr disc) : robin_(disc) {
  const auto& topo = disc->topology;
  omega_of_cell_.assign(topo.num_cells(), -1);
  s_of_cell_.resize(topo.num_cells());
  for (std::size_t k = 0; k < topo.omega_face_cells().size(); ++k)
    omega_of_cell_[topo.omega_face_cells()[k]] = static_cast<Index>(k);
  for (std::size_t k = 0; k < topo.s_faces().size(); ++k)
    s_of_cell_[cell_of_boundary_face(topo, topo.s_faces()[k])].push_back(static_cast<Index>(k));
}

VectorXd PressureMaps::g1(const VectorXd& w1) const {
  const Discretization& d = discretization();
  const VectorXd load = d.fluid.face_area * d.inertia_solver.solve(d.plate.bilaplacian * w1);
  return robin_.solve(load, VectorXd::Zero(static_cast<Index>(d.topology.s_faces().size())));
}

BoundaryTraces PressureMaps::traces(const VectorXd& full_faces) const {
  const Discretization& d = discretization();
  const auto& topo = d.topology;
  const VectorXd lap = d.fluid.laplacian * full_faces;
  VectorXd scattered = VectorXd::Zero(topo.num_faces());
  for (std::size_t s = 0; s < topo.interior_faces().size(); ++s)
    scattered[topo.interior_faces()[s]] = lap[static_cast<Index>(s)];
  // Cell source of the pressure equation, -h^d div(Delta u), assigned to the
  // boundary faces of its cell.
  const VectorXd source = -d.fluid.cell_volume * (d.fluid.divergence * scattered);

  BoundaryTraces t;
  t.omega = VectorXd::Zero(static_cast<Index>(topo.omega_faces().size()));
  t.s = VectorXd::Zero(static_cast<Index>(topo.s_faces().size()));
  for (Index c = 0; c < topo.num_cells(); ++c) {
    const double value = source[c] / d.fluid.face_area;
    if (omega_of_cell_[c] >= 0) {
      t.omega[omega_of_cell_[c]] += value;
    } else if (!s_of_cell_[c].empty()) {
      for (Index k : s_of_cell_[c]) t.s[k] += value / static_cast<double>(s_of_cell_[c].size());
    } else {
      t.interior_residual = std::max(t.interior_residual, std::abs(source[c]));
    }
  }
  t.traction = d.traction(full_faces);
  return t;
}

VectorXd PressureMaps::g2(const VectorXd& full_faces) const {
  const Discretization& d = discretization();
  const BoundaryTraces t = traces(full_faces);
  const VectorXd load = d.fluid.face_area * d.inertia_solver.solve(t.traction);
  return robin_.solve_faces(d.plate.interface * load + t.omega, t.s);
}

VectorXd pressure_from_state(const PressureMaps& maps, const RealState& s) {
  const Discretization& d = maps.discretization();
  if (s.u.size() != d.fluid_size() || s.w1.size() != d.plate_size() ||
      s.w2.size() != d.plate_size())
    throw ConfigError("pressure_from_state: state does not match the grid");
  const VectorXd x = s.stacked();
  const double residual = d.constraint_residual(x);
  if (residual > 1e-8)
    throw ConfigError("pressure_from_state: state violates the constraints (residual " +
                      std::to_string(residual) + ")");
  return maps.g1(s.w1) + maps.g2(d.lift * x);
}

VectorXc pressure_from_state(const PressureMaps& maps, const ComplexState& s) {
  const Discretization& d = maps.discretization();
  if (d.constraint_residual(VectorXc(s.stacked())) > 1e-8)
    throw ConfigError("pressure_from_state: state violates the constraints");
  RealState re(s.grid, s.u.size(), s.w1.size()), im = re;
  re.u = s.u.real(), re.w1 = s.w1.real(), re.w2 = s.w2.real();
  im.u = s.u.imag(), im.w1 = s.w1.imag(), im.w2 = s.w2.imag();
  auto unchecked = [&](const RealState& r) {
    return VectorXd(maps.g1(r.w1) + maps.g2(d.lift * r.stacked()));
  };
  return unchecked(re).cast<Complex>() + Complex(0, 1) * unchecked(im).cast<Complex>();
}

double pressure_h1_norm(const RobinSolver& robin, const VectorXd& p) {
  const double volume = robin.discretization().fluid.cell_volume;
  return std::sqrt(volume * p.squaredNorm() + p.dot(robin.neumann() * p));
}

}  // namespace fsi
