#include "fsi/resolvent.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

using Split = std::pair<RealState, RealState>;

Split split(const ComplexState& s) {
  RealState re(s.grid, s.u.size(), s.w1.size()), im = re;
  re.u = s.u.real(), re.w1 = s.w1.real(), re.w2 = s.w2.real();
  im.u = s.u.imag(), im.w1 = s.w1.imag(), im.w2 = s.w2.imag();
  return {re, im};
}

ComplexState combine(const RealState& re, const RealState& im) {
  ComplexState c = to_complex(re);
  c.u += Complex(0, 1) * im.u.cast<Complex>();
  c.w1 += Complex(0, 1) * im.w1.cast<Complex>();
  c.w2 += Complex(0, 1) * im.w2.cast<Complex>();
  return c;
}

double m_norm(const VectorXc& x, const Discretization& d) {
  return std::sqrt(std::max(0.0, x.dot(apply<Complex>(d.metric.mass, x)).real()));
}

struct RealInverse {
  RealState y;
  VectorXd pressure;
  double flux_defect = 0.0;
};

RealInverse invert_real(const ResolventContext& ctx, const RealState& data) {
  const Discretization& d = *ctx.gen.disc;
  const double scale = std::max(data.w1.cwiseAbs().maxCoeff(), 1e-300);
  if (std::abs(data.w1.mean()) > 1e-10 * scale)
    throw ConfigError("inverse at zero: the plate data has nonzero mean, so the Stokes problem "
                      "has net boundary flux and no solution");
  RealInverse r{RealState(data.grid, d.fluid_size(), d.plate_size()), VectorXd(), 0.0};
  // Step 1: the plate velocity is the displacement data.
  r.y.w2 = data.w1;
  // Step 2: Stokes with Omega data E w2 and force u*.
  const auto stokes = ctx.stokes->solve(data.u, ctx.stokes->omega_data(r.y.w2));
  r.y.u = stokes.u;
  r.flux_defect = std::abs(stokes.flux_defect);
  // Step 3: clamped plate driven by the Stokes pressure, viscous traction and w2*.
  VectorXd q_top(static_cast<Index>(d.topology.omega_faces().size()));
  for (Index k = 0; k < q_top.size(); ++k) q_top[k] = stokes.q[d.topology.omega_face_cells()[k]];
  const VectorXd load = d.plate.interface.transpose() * q_top - d.traction(stokes.full) -
                        d.plate.inertia * data.w2;
  const VectorXd w_hat = d.bilaplacian_solver.solve(load);
  // Step 4: remove the phi component; its coefficient is the pressure constant.
  const double c = ctx.projection.coefficient(w_hat);
  r.y.w1 = w_hat - c * ctx.projection.phi;
  r.pressure = stokes.q.array() - c;
  return r;
}

void check_constrained(const Discretization& d, const ComplexState& data, const char* what) {
  if (data.u.size() != d.fluid_size() || data.w1.size() != d.plate_size() ||
      data.w2.size() != d.plate_size())
    throw ConfigError(std::string(what) + ": data does not match the grid");
  if (d.constraint_residual(VectorXc(data.stacked())) > 1e-8)
    throw ConfigError(std::string(what) + ": data violates the state constraints");
}

// Residual, dissipation and trace diagnostics.
void fill_diagnostics(const ResolventContext& ctx, ResolventSolution& sol) {
  const double sign = sol.data_sign;
  const Discretization& d = *ctx.gen.disc;
  const VectorXc y = sol.state.stacked();
  const VectorXc ystar = sign * sol.data.stacked();
  const VectorXc ay = apply_generator(ctx.gen, sol.state).stacked();
  const VectorXc r = Complex(0, sol.beta) * y - ay - ystar;
  const double data_norm = m_norm(ystar, d);
  sol.diagnostics.residual = data_norm > 0 ? m_norm(r, d) / data_norm : m_norm(r, d);

  const VectorXc full = apply<Complex>(d.lift, y);
  const double grad2 = full.dot(apply<Complex>(d.fluid.stiffness, full)).real();
  const double re = y.dot(apply<Complex>(d.metric.mass, ystar)).real();
  sol.diagnostics.dissipation_gap = grad2 > 0 ? std::abs(grad2 - re) / grad2 : std::abs(re);

  const auto& e = d.plate.interface;
  const VectorXc lhs = Complex(0, sol.beta) * apply<Complex>(e, VectorXc(sol.state.w1));
  const VectorXc w1star = ystar.segment(d.fluid_size(), d.plate_size());
  double gap = 0;
  for (Index k = 0; k < lhs.size(); ++k) {
    const Complex trace = full[d.topology.omega_faces()[k]];
    gap = std::max(gap, std::abs(lhs[k] - trace - apply<Complex>(e, w1star)[k]));
  }
  sol.diagnostics.trace_gap = gap;
}

}  // namespace

ProjectionP build_projection(const Discretization& disc) {
  ProjectionP p;
  p.phi = disc.bilaplacian_solver.solve(VectorXd::Ones(disc.plate_size()));
  if (disc.bilaplacian_solver.info() != Eigen::Success || !p.phi.allFinite())
    throw NumericalError("clamped bilaplacian solve failed");
  p.phi_sum = p.phi.sum();
  return p;
}

ResolventContext make_resolvent_context(Generator gen) {
  ResolventContext ctx{std::move(gen), nullptr, {}};
  ctx.stokes = std::make_shared<const StokesSolver>(ctx.gen.disc);
  ctx.projection = build_projection(*ctx.gen.disc);
  return ctx;
}

ResolventSolution invert_at_zero(const ResolventContext& ctx, const ComplexState& data) {
  check_constrained(*ctx.gen.disc, data, "inverse at zero");
  const auto [re, im] = split(data);
  const RealInverse a = invert_real(ctx, re), b = invert_real(ctx, im);
  ResolventSolution sol;
  sol.beta = 0.0;
  sol.data = data;
  sol.state = combine(a.y, b.y);
  sol.pressure = a.pressure.cast<Complex>() + Complex(0, 1) * b.pressure.cast<Complex>();
  sol.diagnostics.flux_defect = std::max(a.flux_defect, b.flux_defect);
  sol.data_sign = -1.0;
  fill_diagnostics(ctx, sol);
  return sol;
}

ResolventSolution invert_at_zero(const ResolventContext& ctx, const RealState& data) {
  return invert_at_zero(ctx, to_complex(data));
}

ResolventSolution solve_resolvent(const ResolventContext& ctx, double beta, const ComplexState& data) {
  const Generator& gen = ctx.gen;
  check_constrained(*gen.disc, data, "resolvent");
  const Index m = gen.reduced_size();
  const MatrixXc shifted = Complex(0, beta) * MatrixXc::Identity(m, m) - gen.a_red.cast<Complex>();
  Eigen::PartialPivLU<MatrixXc> lu(shifted);
  if (!(lu.rcond() > 1e-14)) {
    Eigen::EigenSolver<MatrixXd> es(gen.a_red, false);
    const VectorXc ev = es.eigenvalues();
    Index nearest = 0;
    (ev.array() - Complex(0, beta)).abs().minCoeff(&nearest);
    std::ostringstream msg;
    msg << "resolvent: i*" << beta << " is numerically in the spectrum; nearest eigenvalue "
        << ev[nearest];
    throw NumericalError(msg.str());
  }
  const VectorXc z = lu.solve(gen.reduce<Complex>(VectorXc(data.stacked())));

  ResolventSolution sol;
  sol.beta = beta;
  sol.data = data;
  sol.state = gen.state_of<Complex>(z);
  sol.pressure = pressure_from_state(*gen.maps, sol.state);
  fill_diagnostics(ctx, sol);
  return sol;
}

LiftReport auxiliary_lift_diagnostic(const ResolventContext& ctx, ResolventSolution& sol) {
  const Discretization& d = *ctx.gen.disc;
  const VectorXc& w1 = sol.state.w1;
  const double scale = std::max(w1.cwiseAbs().maxCoeff(), 1e-300);
  if (std::abs(w1.mean()) > 1e-10 * scale)
    throw ConfigError("lift diagnostic: w1 has nonzero mean, the lift problem is not solvable");
  const VectorXd zero = VectorXd::Zero(d.fluid_size());
  const auto psi_re = ctx.stokes->solve(zero, ctx.stokes->omega_data(w1.real()));
  const auto psi_im = ctx.stokes->solve(zero, ctx.stokes->omega_data(w1.imag()));
  const VectorXc psi_full = psi_re.full.cast<Complex>() + Complex(0, 1) * psi_im.full.cast<Complex>();
  const VectorXc psi = psi_re.u.cast<Complex>() + Complex(0, 1) * psi_im.u.cast<Complex>();

  const double sign = sol.data_sign;
  const VectorXc full = apply<Complex>(d.lift, VectorXc(sol.state.stacked()));
  const double volume = d.fluid.cell_volume, area = d.fluid.face_area;

  LiftReport rep;
  const VectorXc ew1 = apply<Complex>(d.plate.interface, w1);
  rep.lhs = 0;
  for (Index k = 0; k < ew1.size(); ++k)
    rep.lhs += area * sol.pressure[d.topology.omega_face_cells()[k]] * std::conj(ew1[k]);
  rep.rhs = -Complex(0, sol.beta) * volume * psi.dot(sol.state.u) -
            psi_full.dot(apply<Complex>(d.fluid.stiffness, full)) +
            sign * volume * psi.dot(sol.data.u);
  const double denom = std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
  rep.gap = std::abs(rep.lhs - rep.rhs) / denom;
  if (rep.lhs == Complex(0) && rep.rhs == Complex(0)) rep.gap = 0.0;
  sol.diagnostics.lift_gap = rep.gap;
  return rep;
}

void write_resolvent_csv(std::ostream& out, const std::vector<ResolventSolution>& solutions) {
  out << "beta,residual,dissipation_gap,trace_gap,lift_gap\n";
  out << std::setprecision(17);
  for (const auto& s : solutions) {
    out << s.beta << ',' << s.diagnostics.residual << ',' << s.diagnostics.dissipation_gap << ','
        << s.diagnostics.trace_gap << ',';
    if (s.diagnostics.lift_gap) out << *s.diagnostics.lift_gap;
    out << '\n';
  }
}

}  // namespace fsi
