#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsi/generator.hpp"

namespace fsi {

struct BetaGrid {
  int linear_points = 100;
  double linear_max = 10.0;
  int log_points = 100;
  /// Upper end of the log part; 0 selects 1e3 times the spectral radius of A_red.
  double log_max = 0.0;

  std::vector<double> samples(double spectral_radius) const;
};

struct SweepSample {
  double beta = 0.0;
  double resolvent_norm = 0.0;
};

struct SpectralReport {
  GeometryConfig grid;
  double rho = 0.0;
  VectorXc eigenvalues;        // sorted by decreasing real part
  MatrixXc eigenvectors;       // reduced coordinates, unit M-norm columns
  VectorXd residuals;          // ||A v - lambda v||_M / ||v||_M
  double abscissa = 0.0;       // max Re lambda
  double spectral_radius = 0.0;

  std::vector<SweepSample> sweep;
  double c_sup = 0.0;
  double beta_star = 0.0;
  bool interior_max = false;   // false: argmax at the last grid point, enlarge log_max

  double omega = 0.0;          // certified decay rate |alpha|
  double m_overshoot = 0.0;    // max_t e^{omega t} ||e^{At}||_M
};

/// Largest reduced dimension handled by the dense eigensolver.
inline constexpr Index kDenseSpectrumLimit = 6000;

/// All eigenvalues (count < 0) or the `count` rightmost ones.
SpectralReport compute_spectrum(const Generator& gen, int count = -1);

/// ||(i beta - A_red)^{-1}|| in the energy norm, by subspace inverse iteration
/// on (B^H B)^{-1} with a single complex LU of B = i beta - A_red.
double resolvent_norm(const Generator& gen, double beta);

/// Resolvent norms for many beta from one complex Schur form A_red = U T U^H.
/// M_red = I, so ||(i beta - A)^{-1}|| = ||(i beta - T)^{-1}|| and each beta
/// needs triangular solves only. Used by sweep_and_certify.
class ResolventNormEvaluator {
 public:
  explicit ResolventNormEvaluator(const Generator& gen);
  double operator()(double beta) const;

 private:
  MatrixXc t_;
};

/// Fills sweep, c_sup, beta_star, interior_max, omega and m_overshoot.
/// `threads` workers share the sweep; results are stored by index.
void sweep_and_certify(const Generator& gen, SpectralReport& report, const BetaGrid& grid = {},
                       unsigned threads = 1);

/// max over t in [0, horizon] of e^{omega t} ||e^{A t}||_M on `samples` points.
double transient_overshoot(const Generator& gen, double omega, double horizon, int samples = 200);

}  // namespace fsi
