#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>

#include <Eigen/Core>

#include "fsi/errors.hpp"
#include "fsi/operators.hpp"

namespace fsi {

/// Fluid-structure state [u, w1, w2]: velocity on interior faces, plate
/// displacement and plate velocity on plate nodes. Real in the time domain,
/// complex in frequency-domain computations.
template <typename Scalar>
struct State {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GeometryConfig grid;
  Vector u;
  Vector w1;
  Vector w2;

  State() = default;
  State(const GeometryConfig& g, Eigen::Index fluid_size, Eigen::Index plate_size)
      : grid(g),
        u(Vector::Zero(fluid_size)),
        w1(Vector::Zero(plate_size)),
        w2(Vector::Zero(plate_size)) {}

  Eigen::Index size() const { return u.size() + w1.size() + w2.size(); }

  Vector stacked() const {
    Vector x(size());
    x << u, w1, w2;
    return x;
  }

  static State from_stacked(const GeometryConfig& g, Eigen::Index fluid_size,
                            Eigen::Index plate_size, const Vector& x) {
    State s(g, fluid_size, plate_size);
    s.u = x.head(fluid_size);
    s.w1 = x.segment(fluid_size, plate_size);
    s.w2 = x.tail(plate_size);
    return s;
  }

  bool same_shape(const State& other) const {
    return grid.n == other.grid.n && grid.dim_mode == other.grid.dim_mode &&
           u.size() == other.u.size() && w1.size() == other.w1.size();
  }
};

using RealState = State<double>;
using ComplexState = State<Complex>;

inline ComplexState to_complex(const RealState& s) {
  ComplexState c;
  c.grid = s.grid;
  c.u = s.u.cast<Complex>();
  c.w1 = s.w1.cast<Complex>();
  c.w2 = s.w2.cast<Complex>();
  return c;
}

/// (a, b)_{H_rho}, linear in a and conjugate-linear in b.
template <typename Scalar>
Complex energy_inner_product(const State<Scalar>& a, const State<Scalar>& b,
                             const EnergyMetric& metric) {
  if (!a.same_shape(b) || a.grid.n != metric.grid.n || a.grid.dim_mode != metric.grid.dim_mode ||
      a.size() != metric.size())
    throw ConfigError("energy_inner_product: states and metric live on different grids");
  const auto xa = a.stacked().template cast<Complex>().eval();
  const auto xb = b.stacked().template cast<Complex>().eval();
  return xb.dot(apply<Complex>(metric.mass, xa));  // dot conjugates its left operand
}

template <typename Scalar>
double energy_norm(const State<Scalar>& a, const EnergyMetric& metric) {
  return std::sqrt(std::max(0.0, energy_inner_product(a, a, metric).real()));
}

}  // namespace fsi
