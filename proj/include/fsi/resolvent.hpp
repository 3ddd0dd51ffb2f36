#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "fsi/generator.hpp"
#include "fsi/stokes.hpp"

namespace fsi {

/// phi solves the clamped problem Delta^2_h phi = 1. P removes the phi
/// component orthogonally in (Delta_h ., Delta_h .), which reduces to
/// P w = w - (sum w / sum phi) phi; range(P) is the mean-zero plate space.
struct ProjectionP {
  VectorXd phi;
  double phi_sum = 0.0;

  /// Coefficient c with (I - P) w = c phi.
  template <typename Vec>
  auto coefficient(const Vec& w) const {
    return w.sum() / phi_sum;
  }
  template <typename Vec>
  Vec apply(const Vec& w) const {
    return w - coefficient(w) * phi.cast<typename Vec::Scalar>();
  }
  template <typename Vec>
  Vec complement(const Vec& w) const {
    return coefficient(w) * phi.cast<typename Vec::Scalar>();
  }
};

ProjectionP build_projection(const Discretization& disc);

struct ResolventDiagnostics {
  double residual = 0.0;          // ||(i beta - A) y - y*||_M / ||y*||_M
  double dissipation_gap = 0.0;   // | ||grad u||^2 - Re<y*, y>_M | / ||grad u||^2
  double trace_gap = 0.0;         // max over Omega faces |i beta w1 - u.nu - w1*|
  std::optional<double> lift_gap;  // filled by auxiliary_lift_diagnostic
  double flux_defect = 0.0;       // Stokes compatibility residual (inverse at zero)
};

struct ResolventSolution {
  double beta = 0.0;
  ComplexState state;
  VectorXc pressure;  // pi_0
  ComplexState data;
  /// The state solves (i beta - A) y = data_sign * data; invert_at_zero
  /// solves A y = data, so it sets -1.
  double data_sign = 1.0;
  ResolventDiagnostics diagnostics;
};

/// Everything needed to run the stationary machinery on one grid.
struct ResolventContext {
  Generator gen;
  std::shared_ptr<const StokesSolver> stokes;
  ProjectionP projection;
};

ResolventContext make_resolvent_context(Generator gen);

/// Solves A y = y* by the constructive route: w2 = w1*, a stationary Stokes
/// problem with Omega data w1*, a clamped plate solve, then the projection
/// fixes the mean of w1 and the pressure constant. Throws ConfigError when the
/// plate data carries net flux (mean(w1*) != 0).
ResolventSolution invert_at_zero(const ResolventContext& ctx, const ComplexState& data);
ResolventSolution invert_at_zero(const ResolventContext& ctx, const RealState& data);

/// (i beta - A)^{-1} y* by a dense LU in reduced coordinates.
ResolventSolution solve_resolvent(const ResolventContext& ctx, double beta, const ComplexState& data);

/// Stokes lift psi with Omega data w1 and zero force; compares
///   (p|_Omega, w1)_Omega  with  -i beta (u, psi) - (grad u, grad psi) + (u*, psi).
struct LiftReport {
  Complex lhs;
  Complex rhs;
  double gap = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};

LiftReport auxiliary_lift_diagnostic(const ResolventContext& ctx, ResolventSolution& sol);

/// One CSV row per solve: beta,residual,dissipation_gap,trace_gap,lift_gap.
void write_resolvent_csv(std::ostream& out, const std::vector<ResolventSolution>& solutions);

}  // namespace fsi
