#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "fsi/generator.hpp"

namespace fsi {

enum class TimeScheme { implicit_midpoint, backward_euler };

TimeScheme time_scheme_from_string(const std::string& name);
std::string to_string(TimeScheme scheme);

/// Dense one-step propagator in reduced coordinates.
class Propagator {
 public:
  Propagator(const Generator& gen, double dt, TimeScheme scheme = TimeScheme::implicit_midpoint);

  double dt() const { return dt_; }
  TimeScheme scheme() const { return scheme_; }
  const MatrixXd& matrix() const { return step_; }

  VectorXd step(const VectorXd& z) const { return step_ * z; }
  /// ||grad_h u||^2 of a reduced vector.
  double dissipation(const VectorXd& z) const { return z.dot(grad_ * z); }
  /// dt ||grad u_mid||^2 (midpoint) or dt ||grad u_new||^2 (backward Euler).
  double step_dissipation(const VectorXd& z, const VectorXd& z_next) const;

 private:
  double dt_;
  TimeScheme scheme_;
  MatrixXd step_;
  MatrixXd grad_;
};

/// Single step on a constrained state.
RealState step(const Generator& gen, const RealState& y, double dt,
               TimeScheme scheme = TimeScheme::implicit_midpoint);

struct SimulationOptions {
  double t_final = 1.0;
  double dt = 0.0;  // 0 selects h^2 / 4
  TimeScheme scheme = TimeScheme::implicit_midpoint;
  int snapshot_every = 0;  // 0 disables snapshots
};

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<double> energy;       // E = 1/2 ||y||^2_M
  std::vector<double> dissipation;  // cumulative sum of step dissipation
  std::vector<double> mean_w1;
  std::vector<RealState> snapshots;
  std::vector<double> snapshot_times;
};

TrajectoryRecord simulate(const Generator& gen, const RealState& y0, const SimulationOptions& opts);

enum class FitMode { exponential, rational };

struct DecayFit {
  FitMode mode = FitMode::exponential;
  double t0 = 0.0, t1 = 0.0;
  int samples = 0;
  double omega_fit = 0.0;  // E ~ C e^{-omega t}
  double m_fit = 0.0;      // C / ||y0||^2
  double r_squared = 0.0;
  double sup_tE = 0.0;     // sup of t E(t) over the window
  double tE_trend = 0.0;   // mean of t E over the last quarter / first quarter of the window
};

/// Least-squares fit on the window [window_start * T, T], keeping samples with
/// E > 1e-13 E(0). Throws NumericalError with fewer than 20 usable samples.
DecayFit fit_decay(const TrajectoryRecord& record, FitMode mode, double window_start = 0.2);

/// Saddle-point integrator in full coordinates:
///   (M - dt/2 F) x+ - dt C^T p = (M + dt/2 F) x,  C x+ = 0,
/// with C the cell divergence rows plus the mean(w1) row. p is the pressure
/// at the half step.
class DaeIntegrator {
 public:
  DaeIntegrator(DiscretizationPtr disc, double dt);
  struct Result {
    VectorXd x;
    VectorXd pressure;  // cells
  };
  Result step(const VectorXd& x) const;
  double dt() const { return dt_; }

 private:
  DiscretizationPtr disc_;
  double dt_;
  SparseMatrix explicit_part_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

/// CSV "t,E,D,mean_w1".
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);

}  // namespace fsi
