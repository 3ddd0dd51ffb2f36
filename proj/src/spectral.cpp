#include "fsi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "fsi/errors.hpp"
#include "fsi/parallel.hpp"

namespace fsi {

namespace {

// Largest eigenvalue of a Hermitian positive operator by Lanczos with full
// reorthogonalization.
double lanczos_max(const std::function<VectorXc(const VectorXc&)>& op, Index m,
                   std::uint64_t seed) {
  const Index kmax = std::min<Index>(m, 120);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXc v(m, kmax + 1);
  VectorXc start(m);
  for (Index i = 0; i < m; ++i) start[i] = Complex(normal(rng), normal(rng));
  v.col(0) = start.normalized();
  std::vector<double> alpha, beta;
  double theta = 0.0;
  for (Index j = 0; j < kmax; ++j) {
    VectorXc w = op(v.col(j));
    alpha.push_back(v.col(j).dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      const auto basis = v.leftCols(j + 1);
      w -= basis * (basis.adjoint() * w);
    }
    const double b = w.norm();
    const Index k = j + 1;
    MatrixXd t = MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    theta = es.eigenvalues()[k - 1];
    const double tail = b * std::abs(es.eigenvectors()(k - 1, k - 1));
    if (k == m || b <= 1e-14 * std::abs(theta) || tail <= 1e-13 * std::abs(theta)) break;
    beta.push_back(b);
    v.col(j + 1) = w / b;
  }
  return theta;
}

}  // namespace

std::vector<double> BetaGrid::samples(double spectral_radius) const {
  std::vector<double> out;
  if (linear_points < 0 || log_points < 0 || linear_max < 0)
    throw ConfigError("beta grid: point counts and linear_max must be non-negative");
  for (int i = 0; i < linear_points; ++i)
    out.push_back(linear_points == 1 ? 0.0 : linear_max * i / (linear_points - 1));
  const double top = log_max > 0 ? log_max : 1e3 * std::max(spectral_radius, 1.0);
  if (log_points > 0 && top <= linear_max)
    throw ConfigError("beta grid: log_max must exceed linear_max");
  for (int i = 1; i <= log_points; ++i)
    out.push_back(linear_max * std::pow(top / linear_max, static_cast<double>(i) / log_points));
  return out;
}

SpectralReport compute_spectrum(const Generator& gen, int count) {
  const Index m = gen.reduced_size();
  if (m > kDenseSpectrumLimit)
    throw ConfigError("compute_spectrum: reduced dimension " + std::to_string(m) +
                      " exceeds the dense limit " + std::to_string(kDenseSpectrumLimit));
  Eigen::EigenSolver<MatrixXd> es(gen.a_red, true);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
  const VectorXc ev = es.eigenvalues();
  const MatrixXc vec = es.eigenvectors();

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (ev[a].real() != ev[b].real()) return ev[a].real() > ev[b].real();
    return ev[a].imag() > ev[b].imag();
  });
  const Index keep = count < 0 ? m : std::min<Index>(count, m);

  SpectralReport r;
  r.grid = gen.disc->topology.config();
  r.rho = gen.rho();
  r.eigenvalues.resize(keep);
  r.eigenvectors.resize(m, keep);
  r.residuals.resize(keep);
  const MatrixXc a = gen.a_red.cast<Complex>();
  for (Index k = 0; k < keep; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    r.eigenvalues[k] = ev[i];
    r.eigenvectors.col(k) = vec.col(i).normalized();
    r.residuals[k] = (a * r.eigenvectors.col(k) - ev[i] * r.eigenvectors.col(k)).norm();
  }
  r.abscissa = ev[order[0]].real();
  r.spectral_radius = ev.cwiseAbs().maxCoeff();
  return r;
}

double resolvent_norm(const Generator& gen, double beta) {
  const Index m = gen.reduced_size();
  const MatrixXc b = Complex(0, beta) * MatrixXc::Identity(m, m) - gen.a_red.cast<Complex>();
  Eigen::PartialPivLU<MatrixXc> lu(b);
  auto fail = [&] {
    Eigen::EigenSolver<MatrixXd> es(gen.a_red, false);
    const VectorXc ev = es.eigenvalues();
    Index nearest = 0;
    (ev.array() - Complex(0, beta)).abs().minCoeff(&nearest);
    std::ostringstream msg;
    msg << "resolvent_norm: i*" << beta << " lies within 1e-12 of the spectrum (eigenvalue "
        << ev[nearest] << ")";
    throw NumericalError(msg.str());
  };
  if (!(lu.rcond() > 1e-16)) fail();
  const double top = lanczos_max(
      [&](const VectorXc& x) { return VectorXc(lu.adjoint().solve(VectorXc(lu.solve(x)))); }, m,
      0x5eed);
  const double norm = std::sqrt(top);
  if (!std::isfinite(norm) || 1.0 / norm < 1e-12) fail();
  return norm;
}

ResolventNormEvaluator::ResolventNormEvaluator(const Generator& gen) {
  Eigen::ComplexSchur<MatrixXd> schur(gen.a_red);
  if (schur.info() != Eigen::Success) throw NumericalError("resolvent sweep: Schur decomposition failed");
  t_ = schur.matrixT();
}

double ResolventNormEvaluator::operator()(double beta) const {
  const Index m = t_.rows();
  MatrixXc b = -t_;
  b.diagonal().array() += Complex(0, beta);
  Index nearest = 0;
  const double gap = b.diagonal().cwiseAbs().minCoeff(&nearest);
  auto fail = [&] {
    std::ostringstream msg;
    msg << "resolvent_norm: i*" << beta << " lies within 1e-12 of the spectrum (eigenvalue "
        << t_(nearest, nearest) << ")";
    throw NumericalError(msg.str());
  };
  if (!(gap > 1e-12)) fail();
  const auto upper = b.triangularView<Eigen::Upper>();
  const double top = lanczos_max(
      [&](const VectorXc& x) {
        const VectorXc y = upper.solve(x);
        return VectorXc(upper.adjoint().solve(y));
      },
      m, 0x5eed);
  const double norm = std::sqrt(top);
  if (!std::isfinite(norm) || 1.0 / norm < 1e-12) fail();
  return norm;
}

double transient_overshoot(const Generator& gen, double omega, double horizon, int samples) {
  if (samples < 1 || !(horizon > 0)) throw ConfigError("transient_overshoot: bad horizon");
  const Index m = gen.reduced_size();
  const double dt = horizon / samples;
  const MatrixXd step = (gen.a_red * dt).exp();
  MatrixXd power = MatrixXd::Identity(m, m);
  double best = 1.0;
  for (int k = 1; k <= samples; ++k) {
    power = step * power;
    const MatrixXc pc = power.cast<Complex>();
    const double norm2 = lanczos_max(
        [&](const VectorXc& x) { return VectorXc(pc.adjoint() * (pc * x)); }, m, 0xfeed + k);
    best = std::max(best, std::exp(omega * k * dt) * std::sqrt(norm2));
  }
  return best;
}

void sweep_and_certify(const Generator& gen, SpectralReport& report, const BetaGrid& grid,
                       unsigned threads) {
  const std::vector<double> betas = grid.samples(report.spectral_radius);
  report.sweep.assign(betas.size(), {});
  const ResolventNormEvaluator norm(gen);
  parallel_for(betas.size(), threads, [&](std::size_t i) { report.sweep[i] = {betas[i], norm(betas[i])}; });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < report.sweep.size(); ++i)
    if (report.sweep[i].resolvent_norm > report.sweep[arg].resolvent_norm) arg = i;
  report.c_sup = report.sweep.empty() ? 0.0 : report.sweep[arg].resolvent_norm;
  report.beta_star = report.sweep.empty() ? 0.0 : report.sweep[arg].beta;
  report.interior_max = !report.sweep.empty() && arg + 1 < report.sweep.size();

  report.omega = std::abs(report.abscissa);
  const double horizon = report.omega > 0 ? 10.0 / report.omega : 10.0;
  report.m_overshoot = transient_overshoot(gen, report.omega, horizon);
}

}  // namespace fsi
