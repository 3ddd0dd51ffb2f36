#include "fsi/generator.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "fsi/errors.hpp"

namespace fsi {

double Generator::dissipation(const VectorXd& x) const {
  const VectorXd full = disc->lift * x;
  return full.dot(disc->fluid.stiffness * full);
}

Index expected_reduced_size(const Discretization& disc) {
  return disc.fluid_size() + 2 * disc.plate_size() - disc.topology.num_cells() - 1;
}

Generator assemble_generator(DiscretizationPtr disc, std::shared_ptr<const PressureMaps> maps) {
  const Discretization& d = *disc;
  const Index nx = d.state_size(), nc = d.topology.num_cells();

  MatrixXd ct(nx, nc + 1);
  ct.leftCols(nc) = MatrixXd(d.constraint.transpose());
  ct.col(nc).setZero();
  ct.col(nc).segment(d.fluid_size(), d.plate_size()).setConstant(1.0 / d.plate_size());

  Eigen::ColPivHouseholderQR<MatrixXd> qr(ct);
  const Index rank = qr.rank();
  if (nx - rank != expected_reduced_size(d))
    throw NumericalError("constraint rank " + std::to_string(rank) + " differs from " +
                         std::to_string(nc + 1));
  const MatrixXd q = qr.householderQ();
  const MatrixXd n0 = q.rightCols(nx - rank);

  // N = N0 L^{-T}, repeated once so that N^T M N = I to round-off.
  MatrixXd nt = n0.transpose();
  for (int pass = 0; pass < 2; ++pass) {
    const MatrixXd gram = nt * (d.metric.mass * nt.transpose());
    Eigen::LLT<MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw NumericalError("energy metric is not positive on the constrained space");
    nt = llt.matrixL().solve(nt);
  }

  Generator gen;
  gen.disc = std::move(disc);
  gen.maps = std::move(maps);
  gen.basis = nt.transpose();
  gen.a_red = gen.basis.transpose() * (d.form * gen.basis);
  gen.m_red = gen.basis.transpose() * (d.metric.mass * gen.basis);

  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd z(gen.reduced_size());
    for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    const double lhs = z.dot(gen.a_red * z);
    const double rhs = -gen.dissipation(gen.expand<double>(z));
    if (std::abs(lhs - rhs) > 1e-8 * std::max(std::abs(rhs), z.squaredNorm()))
      throw NumericalError("generator assembly violates dissipativity");
  }
  return gen;
}

Generator assemble_generator(const GeometryConfig& grid, double rho) {
  auto disc = make_discretization(grid, rho);
  auto maps = std::make_shared<const PressureMaps>(disc);
  return assemble_generator(disc, maps);
}

namespace {

template <typename Scalar>
State<Scalar> project_impl(const Generator& gen, const State<Scalar>& raw) {
  const Discretization& d = *gen.disc;
  if (raw.u.size() != d.fluid_size() || raw.w1.size() != d.plate_size() ||
      raw.w2.size() != d.plate_size())
    throw ConfigError("project_to_state: state does not match the grid");
  const auto x = raw.stacked();
  return State<Scalar>::from_stacked(raw.grid, d.fluid_size(), d.plate_size(),
                                     gen.expand<Scalar>(gen.reduce<Scalar>(x)));
}

RealState apply_literal(const Generator& gen, const RealState& s, const VectorXd& p) {
  const Discretization& d = *gen.disc;
  const VectorXd full = d.lift * s.stacked();
  RealState out(s.grid, d.fluid_size(), d.plate_size());
  out.u = d.fluid.laplacian * full - d.fluid.gradient * p;
  out.w1 = s.w2;
  VectorXd p_omega(static_cast<Index>(d.topology.omega_faces().size()));
  for (Index k = 0; k < p_omega.size(); ++k) p_omega[k] = p[d.topology.omega_face_cells()[k]];
  const VectorXd load = -(d.plate.bilaplacian * s.w1) - d.traction(full) +
                        d.plate.interface.transpose() * p_omega;
  out.w2 = d.fluid.face_area * d.inertia_solver.solve(load);
  return out;
}

}  // namespace

RealState project_to_state(const Generator& gen, const RealState& raw) {
  return project_impl(gen, raw);
}

ComplexState project_to_state(const Generator& gen, const ComplexState& raw) {
  return project_impl(gen, raw);
}

RealState apply_generator(const Generator& gen, const RealState& s, double* projection_residual) {
  const VectorXd p = pressure_from_state(*gen.maps, s);
  const RealState raw = apply_literal(gen, s, p);
  if (projection_residual) *projection_residual = gen.disc->constraint_residual(raw.stacked());
  RealState out = project_to_state(gen, raw);
  // The w1 block only carries the mean constraint, which w2 already meets.
  out.w1 = s.w2;
  return out;
}

ComplexState apply_generator(const Generator& gen, const ComplexState& s,
                             double* projection_residual) {
  RealState re(s.grid, s.u.size(), s.w1.size()), im = re;
  re.u = s.u.real(), re.w1 = s.w1.real(), re.w2 = s.w2.real();
  im.u = s.u.imag(), im.w1 = s.w1.imag(), im.w2 = s.w2.imag();
  double r_re = 0, r_im = 0;
  const RealState a = apply_generator(gen, re, &r_re), b = apply_generator(gen, im, &r_im);
  if (projection_residual) *projection_residual = std::max(r_re, r_im);
  ComplexState out = to_complex(a);
  out.u += Complex(0, 1) * b.u.cast<Complex>();
  out.w1 += Complex(0, 1) * b.w1.cast<Complex>();
  out.w2 += Complex(0, 1) * b.w2.cast<Complex>();
  return out;
}

}  // namespace fsi
