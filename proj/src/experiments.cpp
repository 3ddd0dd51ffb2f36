#include "fsi/experiments.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/Core>

#include "fsi/errors.hpp"
#include "fsi/lqr.hpp"
#include "fsi/resolvent.hpp"
#include "fsi/semigroup.hpp"
#include "fsi/spectral.hpp"

#ifndef FSI_VERSION
#define FSI_VERSION "0.0.0"
#endif

namespace fsi {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

VectorXd random_reduced(Index m, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  VectorXd z(m);
  for (Index i = 0; i < m; ++i) z[i] = normal(rng);
  return z;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json check(const std::string& name, double value, double tolerance) {
  return {{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", value <= tolerance}};
}

json run_simulate(const RunConfig& cfg, const Generator& gen, OutputWriter& out) {
  const auto& o = cfg.simulate;
  std::mt19937 rng(cfg.seed);
  VectorXd z0;
  if (o.initial == "slowest") {
    const SpectralReport rep = compute_spectrum(gen);
    z0 = rep.eigenvectors.col(0).real();
    if (z0.norm() < 1e-8) z0 = rep.eigenvectors.col(0).imag();
  } else {
    z0 = random_reduced(gen.reduced_size(), rng);
  }
  z0.normalize();
  SimulationOptions sim;
  sim.t_final = o.t_final;
  sim.dt = o.dt;
  sim.scheme = time_scheme_from_string(o.scheme);
  sim.snapshot_every = o.snapshot_every;
  const TrajectoryRecord rec = simulate(gen, gen.state_of<double>(z0), sim);

  FitMode mode = cfg.rho > 0.0 ? FitMode::rational : FitMode::exponential;
  if (o.fit == "exponential") mode = FitMode::exponential;
  if (o.fit == "rational") mode = FitMode::rational;
  const DecayFit fit = fit_decay(rec, mode, o.fit_window);

  if (cfg.wants("csv")) {
    out.write("trajectory.csv", [&](std::ostream& s) { write_trajectory_csv(s, rec); });
    if (!rec.snapshots.empty())
      out.write("snapshots.csv", [&](std::ostream& s) {
        s.precision(17);
        for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
          s << rec.snapshot_times[k];
          const VectorXd x = rec.snapshots[k].stacked();
          for (Index i = 0; i < x.size(); ++i) s << ',' << x[i];
          s << '\n';
        }
      });
  }
  double drift = 0.0;
  for (double m : rec.mean_w1) drift = std::max(drift, std::abs(m - rec.mean_w1.front()));
  const double balance = std::abs(rec.energy.front() - rec.energy.back() - rec.dissipation.back());
  return {{"initial", o.initial},
          {"dt", rec.t.size() > 1 ? rec.t[1] - rec.t[0] : 0.0},
          {"steps", rec.t.size() - 1},
          {"energy_initial", rec.energy.front()},
          {"energy_final", rec.energy.back()},
          {"energy_balance_error", balance / rec.energy.front()},
          {"mean_w1_drift", drift},
          {"fit",
           {{"mode", mode == FitMode::exponential ? "exponential" : "rational"},
            {"window", {fit.t0, fit.t1}},
            {"samples", fit.samples},
            {"omega_fit", fit.omega_fit},
            {"m_fit", fit.m_fit},
            {"r_squared", fit.r_squared},
            {"sup_tE", fit.sup_tE},
            {"tE_trend", fit.tE_trend}}}};
}

json run_spectrum(const RunConfig& cfg, const Generator& gen, OutputWriter& out) {
  const SpectralReport rep = compute_spectrum(gen, cfg.spectrum_count);
  if (cfg.wants("csv"))
    out.write("eigenvalues.csv", [&](std::ostream& s) {
      s << "re,im,residual\n";
      s.precision(17);
      for (Index i = 0; i < rep.eigenvalues.size(); ++i)
        s << rep.eigenvalues[i].real() << ',' << rep.eigenvalues[i].imag() << ',' << rep.residuals[i] << '\n';
    });
  return {{"count", rep.eigenvalues.size()},
          {"abscissa", rep.abscissa},
          {"spectral_radius", rep.spectral_radius},
          {"rightmost", complex_json(rep.eigenvalues[0])},
          {"min_abs_eigenvalue", rep.eigenvalues.cwiseAbs().minCoeff()},
          {"max_residual", rep.residuals.maxCoeff()}};
}

json run_sweep(const RunConfig& cfg, const Generator& gen, OutputWriter& out) {
  SpectralReport rep = compute_spectrum(gen);
  BetaGrid grid;
  grid.linear_points = cfg.sweep.linear_points;
  grid.linear_max = cfg.sweep.linear_max;
  grid.log_points = cfg.sweep.log_points;
  grid.log_max = cfg.sweep.beta_max;
  sweep_and_certify(gen, rep, grid, cfg.threads);
  if (cfg.wants("csv"))
    out.write("sweep.csv", [&](std::ostream& s) {
      s << "beta,resolvent_norm\n";
      s.precision(17);
      for (const auto& p : rep.sweep) s << p.beta << ',' << p.resolvent_norm << '\n';
    });
  return {{"samples", rep.sweep.size()},
          {"beta_max", rep.sweep.back().beta},
          {"abscissa", rep.abscissa},
          {"spectral_radius", rep.spectral_radius},
          {"c_sup", rep.c_sup},
          {"beta_star", rep.beta_star},
          {"interior_max", rep.interior_max},
          {"boundary_argmax_warning", !rep.interior_max},
          {"certificate", {{"omega", rep.omega}, {"M", rep.m_overshoot}}}};
}

json run_invert(const RunConfig& cfg, const Generator& gen, OutputWriter& out) {
  const ResolventContext ctx = make_resolvent_context(gen);
  std::mt19937 rng(cfg.seed);
  std::vector<ResolventSolution> all;
  double worst = 0.0, worst_trace = 0.0;
  for (double beta : cfg.invert.betas)
    for (int k = 0; k < cfg.invert.samples; ++k) {
      const VectorXd re = random_reduced(gen.reduced_size(), rng);
      const VectorXd im = random_reduced(gen.reduced_size(), rng);
      const VectorXc z = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
      const ComplexState data = gen.state_of<Complex>(z);
      ResolventSolution sol = beta == 0.0 ? invert_at_zero(ctx, data) : solve_resolvent(ctx, beta, data);
      auxiliary_lift_diagnostic(ctx, sol);
      worst = std::max(worst, sol.diagnostics.residual);
      worst_trace = std::max(worst_trace, sol.diagnostics.trace_gap);
      all.push_back(std::move(sol));
    }
  if (cfg.wants("csv")) out.write("resolvent.csv", [&](std::ostream& s) { write_resolvent_csv(s, all); });
  return {{"solves", all.size()}, {"max_residual", worst}, {"max_trace_gap", worst_trace}};
}

ControlSetup make_control(const RunConfig& cfg, const Generator& gen) {
  const auto& o = cfg.lqr;
  ControlSetup s = o.control == "point" ? build_point_control(gen, o.locations, o.weights)
                                        : build_boundary_control(gen, o.sigma);
  if (o.observation == "plate") s.observation = plate_observation(gen);
  return s;
}

json run_lqr(const RunConfig& cfg, const Generator& gen, OutputWriter& out) {
  const auto& o = cfg.lqr;
  const ControlSetup setup = make_control(cfg, gen);
  const RiccatiSolution sol = solve_lqr(gen, setup, o.horizon, o.steps);
  json result = {{"control", o.control},
                 {"controls", setup.controls()},
                 {"observation", o.observation},
                 {"horizon", o.horizon},
                 {"residual", sol.residual},
                 {"open_loop_abscissa", sol.open_loop_abscissa},
                 {"closed_loop_abscissa", sol.closed_loop_abscissa},
                 {"gain_norm", sol.gain.norm()}};
  if (o.control == "point") {
    const auto ranks = krylov_rank_growth(gen.a_red, setup.b);
    result["krylov_rank"] = ranks;
    result["controllable"] = !ranks.empty() && ranks.back() == gen.reduced_size();
  }
  if (o.horizon > 0.0 && cfg.wants("csv"))
    out.write("riccati.csv", [&](std::ostream& s) { write_riccati_csv(s, sol); });

  if (o.cost_samples > 0) {
    std::mt19937 rng(cfg.seed);
    const double horizon = 10.0 / std::abs(sol.open_loop_abscissa);
    json costs = json::array();
    bool improved = true;
    for (int k = 0; k < o.cost_samples; ++k) {
      const VectorXd z0 = random_reduced(gen.reduced_size(), rng).normalized();
      const CostResult c = simulate_costs(gen, setup, sol, z0, horizon, o.cost_dt);
      improved = improved && c.closed_loop <= c.zero_control;
      costs.push_back({{"closed_loop", c.closed_loop}, {"zero_control", c.zero_control}});
    }
    result["cost_horizon"] = horizon;
    result["costs"] = costs;
    result["cost_improved"] = improved;
    if (cfg.wants("csv"))
      out.write("costs.csv", [&](std::ostream& s) {
        s << "sample,closed_loop,zero_control\n";
        s.precision(17);
        for (std::size_t k = 0; k < costs.size(); ++k)
          s << k << ',' << costs[k]["closed_loop"].get<double>() << ','
            << costs[k]["zero_control"].get<double>() << '\n';
      });
  }

  json table = json::array();
  table.push_back({{"n", gen.disc->topology.n()}, {"h", gen.disc->topology.h()}, {"gain_norm", sol.gain.norm()}});
  for (int n : o.gain_grids) {
    if (n == gen.disc->topology.n()) continue;
    const Generator other = assemble_generator({cfg.geometry.dim_mode, n}, cfg.rho);
    const ControlSetup s2 = make_control(cfg, other);
    const RiccatiSolution r2 = solve_lqr(other, s2);
    table.push_back({{"n", n}, {"h", other.disc->topology.h()}, {"gain_norm", r2.gain.norm()}});
  }
  result["gain_table"] = table;
  return result;
}

}  // namespace

json validation_suite(const Generator& gen, unsigned seed, int samples) {
  std::mt19937 rng(seed);
  const Index m = gen.reduced_size();
  const Discretization& d = *gen.disc;
  double dissipativity = 0.0, idempotence = 0.0, consistency = 0.0;
  for (int k = 0; k < samples; ++k) {
    const VectorXd z = random_reduced(m, rng);
    const double re = z.dot(gen.a_red * z);
    const double grad = gen.dissipation(gen.expand<double>(z));
    dissipativity = std::max(dissipativity, std::abs(re + grad) / std::max(grad, 1e-300));

    const RealState y = gen.state_of<double>(z);
    const RealState ay = apply_generator(gen, y);
    const VectorXd direct = gen.expand<double>(VectorXd(gen.a_red * z));
    consistency = std::max(consistency, (ay.stacked() - direct).norm() / direct.norm());

    RealState raw(y.grid, d.fluid_size(), d.plate_size());
    raw.u = random_reduced(d.fluid_size(), rng);
    raw.w1 = random_reduced(d.plate_size(), rng);
    raw.w2 = random_reduced(d.plate_size(), rng);
    const RealState once = project_to_state(gen, raw);
    const RealState twice = project_to_state(gen, once);
    idempotence = std::max(idempotence, (twice.stacked() - once.stacked()).norm() / once.stacked().norm());
  }

  const Index ns = static_cast<Index>(d.topology.s_faces().size());
  // Constants are exact only for rho = 0, where the Robin term is f itself.
  const RobinSolver robin0(d.rho() == 0.0 ? gen.disc : make_discretization(d.topology.config(), 0.0));
  const VectorXd constant = robin0.solve(VectorXd::Constant(d.plate_size(), 1.75), VectorXd::Zero(ns));
  const double robin = (constant.array() - 1.75).abs().maxCoeff();

  const ResolventContext ctx = make_resolvent_context(gen);
  double inverse = 0.0;
  for (int k = 0; k < std::min(samples, 10); ++k) {
    const RealState data = gen.state_of<double>(random_reduced(m, rng));
    inverse = std::max(inverse, invert_at_zero(ctx, data).diagnostics.residual);
  }

  json checks = json::array({check("dissipativity", dissipativity, 1e-8),
                             check("projection_idempotence", idempotence, 1e-12),
                             check("robin_constant", robin, 1e-12),
                             check("generator_consistency", consistency, 1e-12),
                             check("inverse_at_zero_residual", inverse, 1e-8)});
  bool all = true;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  return {{"samples", samples}, {"checks", checks}, {"all_pass", all}};
}

RunOutcome run_experiment(const RunConfig& cfg, OutputWriter& out) {
  RunOutcome outcome;
  auto start = Clock::now();
  const Generator gen = assemble_generator(cfg.geometry, cfg.rho);
  outcome.assembly_seconds = seconds_since(start);
  start = Clock::now();
  const std::string& e = cfg.experiment;
  json result;
  if (e == "simulate") result = run_simulate(cfg, gen, out);
  else if (e == "spectrum") result = run_spectrum(cfg, gen, out);
  else if (e == "sweep") result = run_sweep(cfg, gen, out);
  else if (e == "invert") result = run_invert(cfg, gen, out);
  else if (e == "lqr") result = run_lqr(cfg, gen, out);
  else if (e == "validate") {
    result = validation_suite(gen, cfg.seed, cfg.validate_samples);
    outcome.ok = result["all_pass"].get<bool>();
  } else {
    throw ConfigError("experiment.name: unknown experiment '" + e + "'");
  }
  outcome.experiment_seconds = seconds_since(start);
  result["experiment"] = e;
  result["reduced_size"] = gen.reduced_size();
  outcome.result = result;
  if (cfg.wants("json")) out.write_json(e + ".json", result);
  return outcome;
}

void dump_matrices(const RunConfig& cfg, const std::string& target, OutputWriter& out) {
  if (target != "generator" && target != "metric" && target != "basis" && target != "all")
    throw ConfigError("dump target must be generator, metric, basis or all, got '" + target + "'");
  const Generator gen = assemble_generator(cfg.geometry, cfg.rho);
  auto dense = [&](const std::string& name, const MatrixXd& m) {
    out.write(name, [&](std::ostream& s) { write_coordinate(s, m); });
  };
  if (target == "generator" || target == "all") dense("generator.coo", gen.a_red);
  if (target == "metric" || target == "all") {
    dense("metric.coo", gen.m_red);
    out.write("metric_full.coo", [&](std::ostream& s) { write_coordinate(s, gen.disc->metric.mass); });
  }
  if (target == "basis" || target == "all") dense("basis.coo", gen.basis);
}

void write_manifest(const RunConfig& cfg, const std::string& command, const RunOutcome& outcome,
                    OutputWriter& out) {
  json base = {{"command", command},
               {"experiment", cfg.experiment},
               {"config", cfg.source},
               {"grid",
                {{"dim_mode", to_string(cfg.geometry.dim_mode)},
                 {"n", cfg.geometry.n},
                 {"h", 1.0 / cfg.geometry.n}}},
               {"rho", cfg.rho},
               {"seed", cfg.seed},
               {"threads", cfg.threads},
               {"versions",
                {{"fsi", FSI_VERSION},
                 {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)},
                 {"compiler", __VERSION__}}},
               {"timings",
                {{"assembly_seconds", outcome.assembly_seconds},
                 {"experiment_seconds", outcome.experiment_seconds}}},
               {"ok", outcome.ok}};
  out.finish(base);
}

}  // namespace fsi
