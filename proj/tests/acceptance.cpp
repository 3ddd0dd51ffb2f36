// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "fsi/lqr.hpp"
#include "fsi/resolvent.hpp"
#include "fsi/semigroup.hpp"
#include "fsi/spectral.hpp"

using namespace fsi;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  std::string violations;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      violations += " [violated: " + what + "]";
    }
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

VectorXd random_vector(Index n, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

VectorXc random_complex(Index n, std::mt19937& rng) {
  const VectorXd re = random_vector(n, rng), im = random_vector(n, rng);
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

// Shared between criteria 4, 5, 6 and 8.
struct DecayRun {
  double alpha = 0.0;
  DecayFit fit;
  double drift = 0.0;
  double sup_tE = 0.0;
  double seconds = 0.0;
};

DecayRun decay_run(int n, double rho, double t_final, double dt, FitMode mode, unsigned seed) {
  const auto start = Clock::now();
  const Generator gen = assemble_generator({DimMode::analogue2d, n}, rho);
  DecayRun r;
  r.alpha = compute_spectrum(gen).abscissa;
  std::mt19937 rng(seed);
  const VectorXd z0 = random_vector(gen.reduced_size(), rng).normalized();
  SimulationOptions opts;
  opts.t_final = t_final;
  opts.dt = dt;
  const TrajectoryRecord rec = simulate(gen, gen.state_of<double>(z0), opts);
  r.fit = fit_decay(rec, mode, 0.2);
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    r.drift = std::max(r.drift, std::abs(rec.mean_w1[k] - rec.mean_w1.front()));
    r.sup_tE = std::max(r.sup_tE, rec.t[k] * rec.energy[k]);
  }
  r.seconds = seconds_since(start);
  return r;
}

const DecayRun& decay(int n, double rho) {
  static std::map<std::pair<int, double>, DecayRun> cache;
  const auto key = std::make_pair(n, rho);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double h = 1.0 / n;
  DecayRun r;
  if (rho == 0.0) {
    // Twelve e-folds of the slowest amplitude; dt small enough that the
    // midpoint rule does not visibly damp the rate.
    const Generator gen = assemble_generator({DimMode::analogue2d, n}, rho);
    const double alpha = compute_spectrum(gen).abscissa;
    r = decay_run(n, rho, 12.0 / std::abs(alpha), h * h / 40.0, FitMode::exponential, 100 + n);
  } else {
    r = decay_run(n, rho, 1000.0, h * h / 4.0, FitMode::rational, 200 + n);
  }
  return cache.emplace(key, r).first->second;
}

const SpectralReport& sweep(int n, double rho) {
  static std::map<std::pair<int, double>, SpectralReport> cache;
  const auto key = std::make_pair(n, rho);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const Generator gen = assemble_generator({DimMode::analogue2d, n}, rho);
  SpectralReport rep = compute_spectrum(gen);
  sweep_and_certify(gen, rep, {}, 1);
  return cache.emplace(key, std::move(rep)).first->second;
}

void criterion1(Verdict& v) {
  const auto start = Clock::now();
  double worst_re = 0.0, worst_im = 0.0;
  for (int n : {4, 8, 16})
    for (double rho : {0.0, 1.0}) {
      const Generator gen = assemble_generator({DimMode::analogue2d, n}, rho);
      const Discretization& d = *gen.disc;
      std::mt19937 rng(1000 + n + static_cast<int>(10 * rho));
      for (int k = 0; k < 100; ++k) {
        const VectorXc z = random_complex(gen.reduced_size(), rng);
        const Complex lhs = z.dot(gen.a_red.cast<Complex>() * z);
        const VectorXc x = gen.expand<Complex>(z);
        const double grad2 = gen.dissipation(x.real()) + gen.dissipation(x.imag());
        const VectorXc w1 = x.segment(d.fluid_size(), d.plate_size());
        const VectorXc w2 = x.tail(d.plate_size());
        const Complex cross = d.plate.node_area * w2.dot(apply<Complex>(d.plate.bilaplacian, w1));
        worst_re = std::max(worst_re, std::abs(lhs.real() + grad2) / grad2);
        worst_im = std::max(worst_im, std::abs(lhs.imag() + 2 * cross.imag()) / std::abs(lhs));
      }
    }
  const double t = seconds_since(start);
  v.detail << "max rel err Re " << worst_re << ", Im " << worst_im << ", " << t << " s";
  v.require(worst_re <= 1e-8 && worst_im <= 1e-8, "relative error <= 1e-8");
  v.require(t < 60.0, "runtime < 1 min");
}

void criterion2(Verdict& v) {
  const auto start = Clock::now();
  double residual = 0.0, pressure = 0.0;
  for (int n : {4, 8}) {
    const ResolventContext ctx = make_resolvent_context(assemble_generator({DimMode::analogue2d, n}, 0.0));
    const Generator& gen = ctx.gen;
    const EnergyMetric& metric = gen.disc->metric;
    std::mt19937 rng(2000 + n);
    for (int k = 0; k < 20; ++k) {
      const ComplexState data = gen.state_of<Complex>(random_complex(gen.reduced_size(), rng));
      const ResolventSolution sol = invert_at_zero(ctx, data);
      ComplexState back = apply_generator(gen, sol.state);
      back.u -= data.u, back.w1 -= data.w1, back.w2 -= data.w2;
      residual = std::max(residual, energy_norm(back, metric) / energy_norm(data, metric));
      const VectorXc p = pressure_from_state(*gen.maps, sol.state);
      pressure = std::max(pressure, (sol.pressure - p).norm() / p.norm());
    }
  }
  const double t = seconds_since(start);
  v.detail << "max M-residual " << residual << ", pressure mismatch " << pressure << ", " << t << " s";
  v.require(residual <= 1e-8, "residual <= 1e-8");
  v.require(pressure <= 1e-8, "pressure <= 1e-8");
  v.require(t < 60.0, "runtime < 1 min");
}

void criterion3(Verdict& v) {
  const ResolventContext ctx = make_resolvent_context(assemble_generator({DimMode::analogue2d, 8}, 0.0));
  std::mt19937 rng(3000);
  double dissipation = 0.0, trace = 0.0;
  for (double beta : {0.5, 1.0, 5.0, 20.0})
    for (int k = 0; k < 10; ++k) {
      const ComplexState data = ctx.gen.state_of<Complex>(random_complex(ctx.gen.reduced_size(), rng));
      const ResolventSolution sol = solve_resolvent(ctx, beta, data);
      dissipation = std::max(dissipation, sol.diagnostics.dissipation_gap);
      trace = std::max(trace, sol.diagnostics.trace_gap);
    }
  v.detail << "n=8, max dissipation gap " << dissipation << ", max trace gap " << trace
           << " (i beta w1 = u.nu + w1* per Omega DOF)";
  v.require(dissipation <= 1e-8, "dissipation relation <= 1e-8");
  v.require(trace <= 1e-10, "trace relation <= 1e-10");
}

void criterion4(Verdict& v) {
  double seconds = 0.0;
  for (int n : {8, 16}) {
    const DecayRun& r = decay(n, 0.0);
    seconds += r.seconds;
    const double target = 2.0 * std::abs(r.alpha);
    const double rel = std::abs(r.fit.omega_fit - target) / target;
    v.detail << "n=" << n << ": alpha " << r.alpha << ", omega_fit " << r.fit.omega_fit << " vs " << target
             << " (" << 100 * rel << "%), R^2 " << r.fit.r_squared << "; ";
    v.require(r.alpha < 0.0, "alpha < 0");
    v.require(r.fit.r_squared >= 0.99, "R^2 >= 0.99");
    v.require(rel <= 0.10, "omega_fit within 10% of 2|alpha|");
  }
  const double ratio = decay(16, 0.0).alpha / decay(8, 0.0).alpha;
  v.detail << "alpha(16)/alpha(8) " << ratio << ", " << seconds << " s";
  v.require(ratio >= 0.5 && ratio <= 2.0, "alpha ratio in [0.5, 2]");
  v.require(seconds < 600.0, "runtime < 10 min");
}

void criterion5(Verdict& v) {
  for (int n : {8, 16}) {
    const SpectralReport& rep = sweep(n, 0.0);
    v.detail << "n=" << n << ": C_sup " << rep.c_sup << " at beta " << rep.beta_star
             << (rep.interior_max ? " (interior)" : " (last sample)") << "; ";
    v.require(rep.interior_max, "interior maximum");
  }
  const double ratio = sweep(16, 0.0).c_sup / sweep(8, 0.0).c_sup;
  v.detail << "C_sup(16)/C_sup(8) " << ratio << "; ";
  v.require(ratio <= 3.0, "C_sup ratio <= 3");
  for (int n : {8, 16}) {
    const SpectralReport& rep = sweep(n, 0.0);
    const double cut = 1e3 * std::abs(rep.abscissa);
    double worst = 0.0, worst_far = 0.0, at = 0.0;
    for (const auto& s : rep.sweep) {
      const double dev = std::abs(s.resolvent_norm * s.beta - 1.0);
      if (s.beta >= cut && dev > worst) worst = dev, at = s.beta;
      if (s.beta >= 10.0 * rep.spectral_radius) worst_far = std::max(worst_far, dev);
    }
    v.detail << "n=" << n << ": tail beyond 1e3|alpha|=" << cut << " deviates " << 100 * worst << "% at beta " << at
             << " (spectral radius " << rep.spectral_radius << "; beyond 10x radius " << 100 * worst_far << "%)" << (n == 8 ? "; " : "");
    v.require(worst <= 0.10, "1/|beta| within 10% beyond 1e3|alpha| at n=" + std::to_string(n));
  }
}

void criterion6(Verdict& v) {
  const DecayRun& stiff = decay(8, 0.0);
  const Generator gen = assemble_generator({DimMode::analogue2d, 8}, 1.0);
  const double alpha = compute_spectrum(gen).abscissa;
  std::mt19937 rng(600);
  const VectorXd z0 = random_vector(gen.reduced_size(), rng).normalized();
  SimulationOptions opts;
  opts.t_final = 1000.0;
  opts.dt = 1.0 / (4.0 * 64.0);
  const TrajectoryRecord rec = simulate(gen, gen.state_of<double>(z0), opts);
  const DecayFit exp_fit = fit_decay(rec, FitMode::exponential, 0.2);
  const DecayFit rat_fit = fit_decay(rec, FitMode::rational, 0.2);
  double sup = 0.0, at = 0.0;
  for (std::size_t k = 0; k < rec.t.size(); ++k)
    if (rec.t[k] * rec.energy[k] > sup) sup = rec.t[k] * rec.energy[k], at = rec.t[k];
  const double c0 = sweep(8, 0.0).c_sup, c1 = sweep(8, 1.0).c_sup;
  v.detail << "omega_fit rho=1 " << exp_fit.omega_fit << " < rho=0 " << stiff.fit.omega_fit << "; C_sup rho=1 " << c1
           << " > rho=0 " << c0 << "; sup tE " << sup << " at t=" << at << " of T=1000, tail/head tE ratio "
           << rat_fit.tE_trend << " (alpha rho=1 " << alpha << ")";
  v.require(exp_fit.omega_fit < stiff.fit.omega_fit, "omega ordering");
  v.require(c1 > c0, "C_sup ordering");
  v.require(std::isfinite(sup) && at < opts.t_final, "sup tE attained inside [0, T]");
  v.require(rat_fit.tE_trend <= 1.0, "tE not growing over the window");
}

double dae_pressure_gap(int n, double& drift) {
  const Generator gen = assemble_generator({DimMode::analogue2d, n}, 0.0);
  const Discretization& d = *gen.disc;
  const double h = d.topology.h();
  const DaeIntegrator dae(gen.disc, h * h / 4.0);
  std::mt19937 rng(700 + n);
  VectorXd x = gen.expand<double>(random_vector(gen.reduced_size(), rng).normalized());
  const double mean0 = x.segment(d.fluid_size(), d.plate_size()).mean();
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto r = dae.step(x);
    const VectorXd mid = 0.5 * (x + r.x);
    const VectorXd p = pressure_from_state(
        *gen.maps, RealState::from_stacked(d.topology.config(), d.fluid_size(), d.plate_size(), mid));
    const double l2 = std::sqrt(d.fluid.cell_volume) * p.norm();
    worst = std::max(worst, std::sqrt(d.fluid.cell_volume) * (r.pressure - p).norm() / l2);
    x = r.x;
    drift = std::max(drift, std::abs(x.segment(d.fluid_size(), d.plate_size()).mean() - mean0));
  }
  return worst;
}

double dae_drift = 0.0;

void criterion7(Verdict& v) {
  const double e8 = dae_pressure_gap(8, dae_drift), e16 = dae_pressure_gap(16, dae_drift);
  v.detail << "relative L2 gap between multiplier and G-map pressure: n=8 " << e8 << ", n=16 " << e16;
  if (e8 <= 1e-10 && e16 <= 1e-10) {
    v.detail << "; both at round-off, the two pressures coincide on this discretization, so no order is measurable";
    return;
  }
  const double order = std::log2(e8 / e16);
  v.detail << ", order " << order;
  v.require(order >= 0.8, "order >= 0.8");
}

void criterion8(Verdict& v) {
  double drift = dae_drift;
  for (const auto& key : {std::make_pair(8, 0.0), std::make_pair(16, 0.0), std::make_pair(8, 1.0)})
    drift = std::max(drift, decay(key.first, key.second).drift);
  v.detail << "max |mean(w1)(t) - mean(w1)(0)| " << drift << " over the decay and saddle-point runs";
  v.require(drift <= 1e-12, "drift <= 1e-12");
}

void criterion9(Verdict& v) {
  MatrixXd a(1, 1), b(1, 1), q(1, 1);
  a << -0.7;
  b << 1.3;
  q << 2.0 * 2.0;
  const double exact = (a(0, 0) + std::sqrt(a(0, 0) * a(0, 0) + b(0, 0) * b(0, 0) * q(0, 0))) / (b(0, 0) * b(0, 0));
  const double scalar = std::abs(solve_care(a, b, q).p(0, 0) - exact) / exact;

  const Generator gen = assemble_generator({DimMode::analogue2d, 4}, 0.0);
  const ControlSetup setup = build_point_control(gen, {{0.3, 0.5}}, {1.0});
  const RiccatiSolution sol = solve_lqr(gen, setup);
  const MatrixXd rr = setup.observation.transpose() * setup.observation;
  const double residual = (gen.a_red.transpose() * sol.p + sol.p * gen.a_red -
                           sol.p * setup.b * setup.b.transpose() * sol.p + rr).norm() / rr.norm();
  std::mt19937 rng(900);
  bool cheaper = true;
  double worst_ratio = 0.0;
  for (int k = 0; k < 5; ++k) {
    const VectorXd z0 = random_vector(gen.reduced_size(), rng).normalized();
    const CostResult c = simulate_costs(gen, setup, sol, z0, 10.0 / std::abs(sol.open_loop_abscissa), 1e-3);
    cheaper = cheaper && c.closed_loop <= c.zero_control;
    worst_ratio = std::max(worst_ratio, c.closed_loop / c.zero_control);
  }
  v.detail << "scalar rel err " << scalar << "; n=4 ARE residual " << residual << "; abscissa "
           << sol.open_loop_abscissa << " -> " << sol.closed_loop_abscissa << "; max cost ratio " << worst_ratio;
  v.require(scalar <= 1e-10, "scalar closed form");
  v.require(residual <= 1e-8, "ARE residual");
  v.require(sol.closed_loop_abscissa <= sol.open_loop_abscissa, "closed-loop abscissa");
  v.require(cheaper, "closed-loop cost <= zero-control cost");
}

void criterion10(Verdict& v) {
  const Generator gen = assemble_generator({DimMode::analogue2d, 4}, 0.0);
  const double dense = 1.0 / Eigen::JacobiSVD<MatrixXd>(gen.a_red).singularValues().minCoeff();
  const double rn = std::abs(resolvent_norm(gen, 0.0) - dense) / dense;

  std::vector<double> errors;
  for (int n : {8, 16, 32}) {
    const auto disc = make_discretization({DimMode::analogue2d, n}, 0.0);
    const VectorXd phi = build_projection(*disc).phi;
    double err = 0.0;
    for (Index i = 0; i < phi.size(); ++i) {
      const double x = disc->topology.plate_node_position(i)[0];
      err = std::max(err, std::abs(phi[i] - x * x * (1 - x) * (1 - x) / 24.0));
    }
    errors.push_back(err);
  }
  const double order = std::log2(errors[1] / errors[2]);

  const auto plate = assemble_plate_ops(build_grid({DimMode::analogue2d, 5}), 0.0);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd(plate.dirichlet_laplacian));
  double eig = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double expected = (2 - 2 * std::cos(k * std::numbers::pi / 5)) * 25.0;
    eig = std::max(eig, std::abs(es.eigenvalues()[k - 1] - expected) / expected);
  }
  v.detail << "resolvent norm vs dense " << rn << "; phi max error " << errors[0] << ", " << errors[1] << ", "
           << errors[2] << " (order " << order << "); A_D eigenvalue rel err " << eig;
  v.require(rn <= 1e-8, "resolvent norm at 0");
  v.require(order >= 1.8, "phi second order");
  v.require(eig <= 1e-10, "A_D eigenvalues");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"dissipativity identity", criterion1},
      {"constructive inverse at zero", criterion2},
      {"static dissipation and trace relation", criterion3},
      {"exponential decay", criterion4},
      {"resolvent bound", criterion5},
      {"rho contrast", criterion6},
      {"pressure elimination consistency", criterion7},
      {"mean of w1 conserved", criterion8},
      {"LQR sanity", criterion9},
      {"oracle cross-checks", criterion10},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      criteria[k].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.violations += std::string(" [exception: ") + e.what() + "]";
    }
    failed += v.pass ? 0 : 1;
    std::printf("[%s] %zu %s: %s%s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                v.detail.str().c_str(), v.violations.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
