#include "fsi/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "fsi/errors.hpp"
#include "fsi/stokes.hpp"

namespace fsi {

namespace {

double abscissa_of(const MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solve failed in abscissa");
  return es.eigenvalues().real().maxCoeff();
}

MatrixXd symmetrize(const MatrixXd& p) { return 0.5 * (p + p.transpose()); }

double care_residual(const MatrixXd& a, const MatrixXd& g, const MatrixXd& q, const MatrixXd& p) {
  const MatrixXd r = a.transpose() * p + p * a - p * g * p + q;
  const double scale = q.norm() > 0.0 ? q.norm() : 1.0;
  return r.norm() / scale;
}

}  // namespace

MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q) {
  const Index m = a.rows();
  if (a.cols() != m || q.rows() != m || q.cols() != m)
    throw ConfigError("solve_lyapunov: dimension mismatch");
  if (m == 0) return MatrixXd(0, 0);
  Eigen::ComplexSchur<MatrixXd> schur(a);
  if (schur.info() != Eigen::Success) throw NumericalError("solve_lyapunov: Schur decomposition failed");
  const MatrixXc& t = schur.matrixT();
  const MatrixXc& u = schur.matrixU();
  // A = U T U^H, so T^H Y + Y T = -U^H Q U with X = U Y U^H.
  const MatrixXc c = -(u.adjoint() * q.cast<Complex>() * u);
  const MatrixXc th = t.adjoint();
  MatrixXc y = MatrixXc::Zero(m, m);
  for (Index j = 0; j < m; ++j) {
    VectorXc rhs = c.col(j);
    if (j > 0) rhs.noalias() -= y.leftCols(j) * t.col(j).head(j);
    MatrixXc lower = th;
    lower.diagonal().array() += t(j, j);
    const Complex pivot_min = lower.diagonal().cwiseAbs().minCoeff();
    if (std::abs(pivot_min) < 1e-300)
      throw NumericalError("solve_lyapunov: A and -A^T share an eigenvalue");
    y.col(j) = lower.triangularView<Eigen::Lower>().solve(rhs);
  }
  const MatrixXc x = u * y * u.adjoint();
  return symmetrize(x.real());
}

CareResult solve_care(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, double u_weight,
                      double tol, const MatrixXd* initial) {
  const Index m = a.rows();
  if (a.cols() != m || b.rows() != m || q.rows() != m || q.cols() != m)
    throw ConfigError("solve_care: dimension mismatch");
  if (!(u_weight > 0.0)) throw ConfigError("solve_care: control weight must be positive");
  const MatrixXd g = b * b.transpose() / u_weight;
  CareResult out;
  MatrixXd p = initial ? *initial : MatrixXd::Zero(m, m);
  if (!initial && abscissa_of(a) >= 0.0)
    throw NumericalError("solve_care: open loop is not stable and no stabilizing guess was given");
  constexpr int kMaxIterations = 60;
  for (int it = 0; it < kMaxIterations; ++it) {
    const MatrixXd acl = a - g * p;
    const MatrixXd rhs = q + p * g * p;
    p = solve_lyapunov(acl, rhs);
    out.iterations = it + 1;
    const double res = care_residual(a, g, q, p);
    out.history.push_back(res);
    if (res <= tol) {
      out.p = p;
      out.residual = res;
      return out;
    }
    // Newton stagnates at round-off; stop once the residual no longer drops.
    if (it > 3 && res > 0.5 * out.history[out.history.size() - 2] && res < 1e-8) break;
  }
  out.p = p;
  out.residual = out.history.back();
  if (out.residual <= std::max(tol, 1e-8)) return out;
  std::ostringstream msg;
  msg << "Riccati iteration did not converge; residual history:";
  for (double r : out.history) msg << ' ' << r;
  throw NumericalError(msg.str());
}

MatrixXd care_by_hamiltonian(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, double u_weight) {
  const Index m = a.rows();
  MatrixXd h(2 * m, 2 * m);
  h << a, -b * b.transpose() / u_weight, -q, -a.transpose();
  Eigen::ComplexEigenSolver<MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian eigensolve failed");
  MatrixXc basis(2 * m, m);
  Index k = 0;
  for (Index i = 0; i < 2 * m; ++i)
    if (es.eigenvalues()[i].real() < 0.0 && k < m) basis.col(k++) = es.eigenvectors().col(i);
  if (k != m) throw NumericalError("Hamiltonian matrix has eigenvalues on the imaginary axis");
  const MatrixXc x1 = basis.topRows(m);
  const MatrixXc x2 = basis.bottomRows(m);
  const MatrixXc p = x1.transpose().partialPivLu().solve(x2.transpose()).transpose();
  return symmetrize(p.real());
}

ControlSetup build_point_control(const Generator& gen, const std::vector<std::array<double, 2>>& xi,
                                 const std::vector<double>& a) {
  const Discretization& d = *gen.disc;
  const GridTopology& topo = d.topology;
  const int pd = topo.dim() - 1;
  const int n = topo.n();
  const double h = topo.h();
  if (xi.empty()) throw ConfigError("point control needs at least one location");
  if (!a.empty() && a.size() != xi.size())
    throw ConfigError("point control: " + std::to_string(a.size()) + " weights for " +
                      std::to_string(xi.size()) + " locations");
  ControlSetup s;
  s.kind = ControlKind::point_plate;
  s.locations = xi;
  s.weights = a.empty() ? std::vector<double>(xi.size(), 1.0) : a;
  const Index np = d.plate_size();
  const Index nj = static_cast<Index>(xi.size());
  s.plate_forcing = MatrixXd::Zero(np, nj);
  const double delta = 1.0 / std::pow(h, pd);
  for (Index j = 0; j < nj; ++j) {
    std::array<int, 2> idx{0, 0};
    for (int k = 0; k < pd; ++k) {
      const double x = xi[j][k];
      if (!(x > 0.0 && x < 1.0))
        throw ConfigError("point control location " + std::to_string(j) +
                          " must lie strictly inside Omega, coordinate " + std::to_string(x));
      idx[k] = std::clamp(static_cast<int>(std::lround(x / h)), 1, n - 1);
    }
    const Index node = topo.plate_index(idx);
    s.nodes.push_back(node);
    s.plate_forcing(node, j) = s.weights[j] * delta;
  }
  const double area = d.plate.node_area;
  s.injection.resize(np, nj);
  for (Index j = 0; j < nj; ++j)
    s.injection.col(j) = d.inertia_solver.solve(area * s.plate_forcing.col(j));
  MatrixXd f = MatrixXd::Zero(d.state_size(), nj);
  f.bottomRows(np) = area * s.plate_forcing;
  s.b = gen.basis.transpose() * f;
  s.observation = MatrixXd::Identity(gen.reduced_size(), gen.reduced_size());
  s.u_weight = 1.0;
  return s;
}

ControlSetup build_boundary_control(const Generator& gen, const std::vector<Index>& sigma) {
  const Discretization& d = *gen.disc;
  const GridTopology& topo = d.topology;
  const auto& s_faces = topo.s_faces();
  const Index ns = static_cast<Index>(s_faces.size());
  if (sigma.empty()) throw ConfigError("boundary control: Sigma is empty");
  std::vector<char> in_sigma(ns, 0);
  for (Index k : sigma) {
    if (k < 0 || k >= ns)
      throw ConfigError("boundary control: Sigma index " + std::to_string(k) +
                        " is not an S face (Sigma must not overlap Omega)");
    if (in_sigma[k]) throw ConfigError("boundary control: Sigma lists face " + std::to_string(k) + " twice");
    in_sigma[k] = 1;
  }
  const Index rest = ns - static_cast<Index>(sigma.size());
  if (rest == 0) throw ConfigError("boundary control: Sigma covers all of S, no face left for flux balance");

  ControlSetup s;
  s.kind = ControlKind::boundary_normal;
  s.sigma = sigma;
  const Index nj = static_cast<Index>(sigma.size());
  const Index np = d.plate_size();
  const Index nf = topo.num_faces();
  s.boundary_data = MatrixXd::Zero(nf, nj);
  s.plate_forcing.resize(np, nj);
  s.injection.resize(np, nj);
  const StokesSolver stokes(gen.disc);
  const auto& cells = topo.omega_face_cells();
  for (Index j = 0; j < nj; ++j) {
    // Outward normal velocity g = 1 on face sigma[j]; stored values are
    // components along the axis, so the outward normal enters as a sign.
    VectorXd data = VectorXd::Zero(nf);
    const Index face = s_faces[sigma[j]];
    auto outward = [&](Index f) { return topo.face_normal(f)[topo.face_component(f)]; };
    data[face] = outward(face);
    for (Index k = 0; k < ns; ++k)
      if (!in_sigma[k]) data[s_faces[k]] = -outward(s_faces[k]) / static_cast<double>(rest);
    s.boundary_data.col(j) = data;
    const auto lift = stokes.solve(VectorXd::Zero(d.fluid_size()), data);
    VectorXd q_top(static_cast<Index>(cells.size()));
    for (Index k = 0; k < q_top.size(); ++k) q_top[k] = lift.q[cells[k]];
    s.plate_forcing.col(j) = d.plate.interface.transpose() * q_top - d.traction(lift.full);
    s.injection.col(j) = d.inertia_solver.solve(d.plate.node_area * s.plate_forcing.col(j));
  }
  MatrixXd f = MatrixXd::Zero(d.state_size(), nj);
  f.bottomRows(np) = d.plate.node_area * s.plate_forcing;
  s.b = gen.basis.transpose() * f;
  s.observation = MatrixXd::Identity(gen.reduced_size(), gen.reduced_size());
  s.u_weight = d.fluid.face_area;
  return s;
}

MatrixXd plate_observation(const Generator& gen) {
  const Discretization& d = *gen.disc;
  const Index np = d.plate_size();
  // ||R z||^2 = (w1, w1)_{Delta^2} + (w2, w2)_P, the plate part of the energy.
  const SparseMatrix mp = d.metric.mass.bottomRightCorner(2 * np, 2 * np);
  const MatrixXd np_basis = gen.basis.bottomRows(2 * np);
  const MatrixXd gram = np_basis.transpose() * mp * np_basis;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(gram));
  const VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return root.asDiagonal() * es.eigenvectors().transpose();
}

RiccatiSolution solve_lqr(const Generator& gen, const ControlSetup& setup, double horizon, int steps) {
  const MatrixXd& a = gen.a_red;
  const MatrixXd& b = setup.b;
  const Index m = a.rows();
  if (b.rows() != m || setup.observation.cols() != m)
    throw ConfigError("solve_lqr: control setup was built for a different generator");
  const MatrixXd q = setup.observation.transpose() * setup.observation;
  const MatrixXd g = b * b.transpose() / setup.u_weight;
  RiccatiSolution sol;
  sol.open_loop_abscissa = abscissa_of(a);
  if (horizon <= 0.0) {
    const CareResult care = solve_care(a, b, q, setup.u_weight, 1e-10);
    sol.p = care.p;
    sol.residual = care.residual;
  } else {
    if (steps < 1) throw ConfigError("solve_lqr: finite horizon needs at least one step");
    // Midpoint step from t+dt to t: X = (P(t) + P(t+dt))/2 solves the
    // Riccati equation with A - I/dt and Q + (2/dt) P(t+dt).
    const double dt = horizon / steps;
    const MatrixXd shifted = a - MatrixXd::Identity(m, m) / dt;
    MatrixXd next = MatrixXd::Zero(m, m);
    MatrixXd guess = MatrixXd::Zero(m, m);
    sol.times.assign(steps + 1, 0.0);
    sol.trajectory.assign(steps + 1, MatrixXd());
    sol.times[steps] = horizon;
    sol.trajectory[steps] = next;
    for (int k = steps - 1; k >= 0; --k) {
      const MatrixXd qk = q + (2.0 / dt) * next;
      const CareResult step = solve_care(shifted, b, qk, setup.u_weight, 1e-12, &guess);
      guess = step.p;
      next = symmetrize(2.0 * step.p - next);
      sol.times[k] = k * dt;
      sol.trajectory[k] = next;
      sol.residual = std::max(sol.residual, step.residual);
    }
    sol.p = sol.trajectory.front();
  }
  sol.gain = -b.transpose() * sol.p / setup.u_weight;
  sol.closed_loop_abscissa = abscissa_of(a - g * sol.p);
  return sol;
}

std::vector<Index> krylov_rank_growth(const MatrixXd& a, const MatrixXd& b, double tol) {
  const Index m = a.rows();
  MatrixXd q(m, 0);
  std::vector<Index> ranks;
  MatrixXd block = b;
  while (q.cols() < m) {
    MatrixXd accepted(m, 0);
    for (Index j = 0; j < block.cols(); ++j) {
      VectorXd v = block.col(j);
      const double before = v.norm();
      if (before == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (q.cols() > 0) v -= q * (q.transpose() * v);
        if (accepted.cols() > 0) v -= accepted * (accepted.transpose() * v);
      }
      if (v.norm() <= tol * before) continue;
      accepted.conservativeResize(m, accepted.cols() + 1);
      accepted.col(accepted.cols() - 1) = v.normalized();
    }
    if (accepted.cols() == 0) break;
    q.conservativeResize(m, q.cols() + accepted.cols());
    q.rightCols(accepted.cols()) = accepted;
    ranks.push_back(q.cols());
    block = a * accepted;
  }
  return ranks;
}

CostResult simulate_costs(const Generator& gen, const ControlSetup& setup, const RiccatiSolution& sol,
                          const VectorXd& z0, double horizon, double dt) {
  const Index m = gen.reduced_size();
  if (z0.size() != m) throw ConfigError("simulate_costs: initial state has the wrong size");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("simulate_costs: dt and horizon must be positive");
  const MatrixXd id = MatrixXd::Identity(m, m);
  auto run = [&](const MatrixXd& a, const MatrixXd* gain) {
    const Eigen::PartialPivLU<MatrixXd> lu(id - 0.5 * dt * a);
    const MatrixXd step = lu.solve(id + 0.5 * dt * a);
    const int n = static_cast<int>(std::ceil(horizon / dt));
    VectorXd z = z0;
    double cost = 0.0;
    for (int k = 0; k < n; ++k) {
      const VectorXd zn = step * z;
      const VectorXd mid = 0.5 * (z + zn);
      double rate = (setup.observation * mid).squaredNorm();
      if (gain) rate += setup.u_weight * (*gain * mid).squaredNorm();
      cost += dt * rate;
      z = zn;
    }
    return cost;
  };
  CostResult c;
  c.zero_control = run(gen.a_red, nullptr);
  c.closed_loop = run(gen.a_red + setup.b * sol.gain, &sol.gain);
  return c;
}

void write_riccati_csv(std::ostream& out, const RiccatiSolution& sol) {
  out << "t,trace_P\n";
  out.precision(17);
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    out << sol.times[k] << ',' << sol.trajectory[k].trace() << '\n';
}

}  // namespace fsi
