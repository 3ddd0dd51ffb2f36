#include "fsi/semigroup.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/Dense>

#include "fsi/errors.hpp"

namespace fsi {

TimeScheme time_scheme_from_string(const std::string& name) {
  if (name == "implicit_midpoint") return TimeScheme::implicit_midpoint;
  if (name == "backward_euler") return TimeScheme::backward_euler;
  throw ConfigError("unknown time scheme '" + name + "' (implicit_midpoint | backward_euler)");
}

std::string to_string(TimeScheme scheme) {
  return scheme == TimeScheme::implicit_midpoint ? "implicit_midpoint" : "backward_euler";
}

Propagator::Propagator(const Generator& gen, double dt, TimeScheme scheme)
    : dt_(dt), scheme_(scheme) {
  if (!std::isfinite(dt) || dt == 0.0) throw ConfigError("time step must be finite and nonzero");
  const Index m = gen.reduced_size();
  const MatrixXd id = MatrixXd::Identity(m, m);
  if (scheme == TimeScheme::implicit_midpoint) {
    Eigen::PartialPivLU<MatrixXd> lu(id - 0.5 * dt * gen.a_red);
    step_ = lu.solve(id + 0.5 * dt * gen.a_red);
  } else {
    Eigen::PartialPivLU<MatrixXd> lu(id - dt * gen.a_red);
    step_ = lu.solve(id);
  }
  if (!step_.allFinite()) throw NumericalError("propagator factorization failed");
  const MatrixXd ln = gen.disc->lift * gen.basis;
  grad_ = ln.transpose() * (gen.disc->fluid.stiffness * ln);
}

double Propagator::step_dissipation(const VectorXd& z, const VectorXd& z_next) const {
  if (scheme_ == TimeScheme::implicit_midpoint) return dt_ * dissipation(0.5 * (z + z_next));
  return dt_ * dissipation(z_next);
}

namespace {

void check_state(const Generator& gen, const RealState& y) {
  const Discretization& d = *gen.disc;
  if (y.u.size() != d.fluid_size() || y.w1.size() != d.plate_size() ||
      y.w2.size() != d.plate_size())
    throw ConfigError("state does not match the grid");
  if (d.constraint_residual(y.stacked()) > 1e-8)
    throw ConfigError("initial state violates the constraints; project it first");
}

}  // namespace

RealState step(const Generator& gen, const RealState& y, double dt, TimeScheme scheme) {
  check_state(gen, y);
  const Propagator prop(gen, dt, scheme);
  return gen.state_of<double>(prop.step(gen.reduce<double>(y.stacked())));
}

TrajectoryRecord simulate(const Generator& gen, const RealState& y0, const SimulationOptions& opts) {
  check_state(gen, y0);
  if (!(opts.t_final > 0)) throw ConfigError("time.t_final must be > 0");
  if (opts.dt < 0) throw ConfigError("time.dt must be >= 0");
  const double h = gen.disc->topology.h();
  double dt = opts.dt > 0 ? opts.dt : 0.25 * h * h;
  const long steps = std::max<long>(1, std::lround(std::ceil(opts.t_final / dt - 1e-9)));
  dt = opts.t_final / static_cast<double>(steps);
  const Propagator prop(gen, dt, opts.scheme);

  const Discretization& d = *gen.disc;
  const VectorXd mean_row =
      gen.basis.middleRows(d.fluid_size(), d.plate_size()).colwise().mean().transpose();

  TrajectoryRecord rec;
  VectorXd z = gen.reduce<double>(y0.stacked());
  double dissipated = 0.0;
  auto record = [&](double t) {
    rec.t.push_back(t);
    rec.energy.push_back(0.5 * z.squaredNorm());
    rec.dissipation.push_back(dissipated);
    rec.mean_w1.push_back(mean_row.dot(z));
  };
  record(0.0);
  if (opts.snapshot_every > 0) {
    rec.snapshots.push_back(y0);
    rec.snapshot_times.push_back(0.0);
  }
  for (long k = 1; k <= steps; ++k) {
    const VectorXd next = prop.step(z);
    dissipated += prop.step_dissipation(z, next);
    z = next;
    const double t = dt * static_cast<double>(k);
    record(t);
    if (opts.snapshot_every > 0 && k % opts.snapshot_every == 0) {
      rec.snapshots.push_back(gen.state_of<double>(z));
      rec.snapshot_times.push_back(t);
    }
  }
  return rec;
}

DecayFit fit_decay(const TrajectoryRecord& record, FitMode mode, double window_start) {
  if (record.t.empty()) throw NumericalError("fit_decay: empty trajectory");
  if (!(window_start >= 0 && window_start < 1)) throw ConfigError("fit window start must be in [0, 1)");
  DecayFit fit;
  fit.mode = mode;
  const double e0 = record.energy.front();
  fit.t1 = record.t.back();
  fit.t0 = window_start * fit.t1;

  std::vector<double> ts, logs, te;
  for (std::size_t k = 0; k < record.t.size(); ++k) {
    if (record.t[k] < fit.t0) continue;
    te.push_back(record.t[k] * record.energy[k]);
    if (record.energy[k] > 1e-13 * e0) {
      ts.push_back(record.t[k]);
      logs.push_back(std::log(record.energy[k]));
    }
  }
  fit.samples = static_cast<int>(ts.size());
  if (fit.samples < 20)
    throw NumericalError("fit_decay: only " + std::to_string(fit.samples) +
                         " usable samples in the window (need 20)");

  const double n = static_cast<double>(ts.size());
  double st = 0, sl = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) st += ts[k], sl += logs[k];
  const double mt = st / n, ml = sl / n;
  double stt = 0, stl = 0, sll = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    stl += (ts[k] - mt) * (logs[k] - ml);
    sll += (logs[k] - ml) * (logs[k] - ml);
  }
  const double slope = stl / stt;
  const double intercept = ml - slope * mt;
  fit.omega_fit = -slope;
  fit.m_fit = std::exp(intercept) / (2.0 * e0);
  fit.r_squared = sll > 0 ? stl * stl / (stt * sll) : 1.0;

  for (double v : te) fit.sup_tE = std::max(fit.sup_tE, v);
  const std::size_t q = std::max<std::size_t>(1, te.size() / 4);
  double first = 0, last = 0;
  for (std::size_t k = 0; k < q; ++k) first += te[k], last += te[te.size() - 1 - k];
  fit.tE_trend = first > 0 ? last / first : 0.0;
  return fit;
}

DaeIntegrator::DaeIntegrator(DiscretizationPtr disc, double dt) : disc_(std::move(disc)), dt_(dt) {
  if (!(dt > 0)) throw ConfigError("time step must be > 0");
  const Discretization& d = *disc_;
  const Index nx = d.state_size(), nc = d.topology.num_cells();
  const SparseMatrix lhs = d.metric.mass - 0.5 * dt * d.form;
  explicit_part_ = d.metric.mass + 0.5 * dt * d.form;

  std::vector<Eigen::Triplet<double>> t;
  for (Index col = 0; col < lhs.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(lhs, col); it; ++it) t.emplace_back(it.row(), col, it.value());
  for (Index col = 0; col < d.constraint.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(d.constraint, col); it; ++it) {
      t.emplace_back(nx + it.row(), col, it.value());
      t.emplace_back(col, nx + it.row(), -dt * it.value());
    }
  const double w = 1.0 / static_cast<double>(d.plate_size());
  for (Index k = 0; k < d.plate_size(); ++k) {
    t.emplace_back(nx + nc, d.fluid_size() + k, w);
    t.emplace_back(d.fluid_size() + k, nx + nc, -dt * w);
  }
  SparseMatrix kkt(nx + nc + 1, nx + nc + 1);
  kkt.setFromTriplets(t.begin(), t.end());
  lu_.compute(kkt);
  if (lu_.info() != Eigen::Success) throw NumericalError("DAE saddle-point factorization failed");
}

DaeIntegrator::Result DaeIntegrator::step(const VectorXd& x) const {
  const Discretization& d = *disc_;
  const Index nx = d.state_size(), nc = d.topology.num_cells();
  VectorXd rhs = VectorXd::Zero(nx + nc + 1);
  rhs.head(nx) = explicit_part_ * x;
  const VectorXd sol = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !sol.allFinite()) throw NumericalError("DAE step failed");
  return {sol.head(nx), sol.segment(nx, nc)};
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  out << "t,E,D,mean_w1\n" << std::setprecision(17);
  for (std::size_t k = 0; k < record.t.size(); ++k)
    out << record.t[k] << ',' << record.energy[k] << ',' << record.dissipation[k] << ','
        << record.mean_w1[k] << '\n';
}

}  // namespace fsi
