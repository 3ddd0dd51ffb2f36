#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "fsi/lqr.hpp"
#include "fsi/stokes.hpp"

using namespace fsi;

namespace {

VectorXd random_vector(Index n, std::mt19937& gen) {
  std::normal_distribution<double> normal;
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(gen);
  return v;
}

double min_eigenvalue(const MatrixXd& p) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (p + p.transpose())).eigenvalues().minCoeff();
}

const Generator& small_generator() {
  static const Generator gen = assemble_generator({DimMode::analogue2d, 4}, 0.0);
  return gen;
}

}  // namespace

TEST_CASE("Lyapunov solve") {
  std::mt19937 rng(11);
  MatrixXd a(6, 6);
  for (Index j = 0; j < 6; ++j) a.col(j) = random_vector(6, rng);
  a.diagonal().array() -= 6.0;
  MatrixXd c(6, 3);
  for (Index j = 0; j < 3; ++j) c.col(j) = random_vector(6, rng);
  const MatrixXd q = c * c.transpose();
  const MatrixXd x = solve_lyapunov(a, q);
  CHECK((a.transpose() * x + x * a + q).norm() <= 1e-12 * q.norm());
  CHECK((x - x.transpose()).norm() <= 1e-14 * x.norm());
  CHECK(min_eigenvalue(x) >= -1e-12 * x.norm());
}

TEST_CASE("scalar Riccati matches the closed form") {
  for (double a0 : {-0.1, -2.0, -30.0})
    for (double b0 : {0.5, 3.0}) {
      const double r = 1.5;
      MatrixXd a(1, 1), b(1, 1), q(1, 1);
      a << a0;
      b << b0;
      q << r * r;
      const double exact = (a0 + std::sqrt(a0 * a0 + b0 * b0 * r * r)) / (b0 * b0);
      const CareResult res = solve_care(a, b, q);
      CHECK(std::abs(res.p(0, 0) - exact) <= 1e-10 * exact);
    }
}

TEST_CASE("unstable open loop without a guess is rejected") {
  MatrixXd a(1, 1), b(1, 1), q(1, 1);
  a << 1.0;
  b << 1.0;
  q << 1.0;
  CHECK_THROWS_AS(solve_care(a, b, q), NumericalError);
  MatrixXd guess(1, 1);
  guess << 3.0;
  const CareResult res = solve_care(a, b, q, 1.0, 1e-10, &guess);
  CHECK(res.p(0, 0) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("point control injection") {
  const Generator& gen = small_generator();
  const Discretization& d = *gen.disc;
  const double h = d.topology.h();
  const ControlSetup s = build_point_control(gen, {{0.5, 0.5}}, {1.0});
  REQUIRE(s.controls() == 1);
  Index nonzero = 0;
  for (Index i = 0; i < s.plate_forcing.rows(); ++i)
    if (s.plate_forcing(i, 0) != 0.0) {
      ++nonzero;
      CHECK(s.plate_forcing(i, 0) == doctest::Approx(1.0 / h));
      CHECK(d.topology.plate_node_position(i)[0] == doctest::Approx(0.5));
    }
  CHECK(nonzero == 1);
  CHECK((s.injection - s.plate_forcing).norm() <= 1e-12 * s.plate_forcing.norm());

  const Generator stiff = assemble_generator({DimMode::analogue2d, 4}, 1.0);
  const ControlSetup sr = build_point_control(stiff, {{0.3, 0.5}}, {2.0});
  const VectorXd back = stiff.disc->plate.inertia * sr.injection.col(0);
  CHECK((back - sr.plate_forcing.col(0)).norm() <= 1e-12 * sr.plate_forcing.norm());

  CHECK_THROWS_AS(build_point_control(gen, {{0.0, 0.5}}, {1.0}), ConfigError);
  CHECK_THROWS_AS(build_point_control(gen, {{1.2, 0.5}}, {1.0}), ConfigError);
  CHECK_THROWS_AS(build_point_control(gen, {}, {}), ConfigError);
  CHECK_THROWS_AS(build_point_control(gen, {{0.5, 0.5}}, {1.0, 2.0}), ConfigError);
}

TEST_CASE("Krylov rank saturates for an off-centre point") {
  const Generator& gen = small_generator();
  const ControlSetup s = build_point_control(gen, {{0.3, 0.5}}, {1.0});
  const auto ranks = krylov_rank_growth(gen.a_red, s.b);
  REQUIRE(!ranks.empty());
  for (std::size_t k = 1; k < ranks.size(); ++k) CHECK(ranks[k] > ranks[k - 1]);
  CHECK(ranks.back() == gen.reduced_size());
}

TEST_CASE("infinite-horizon LQR with point control") {
  const Generator& gen = small_generator();
  const ControlSetup s = build_point_control(gen, {{0.3, 0.5}}, {1.0});
  const RiccatiSolution sol = solve_lqr(gen, s);
  const MatrixXd q = s.observation.transpose() * s.observation;
  const MatrixXd r = gen.a_red.transpose() * sol.p + sol.p * gen.a_red -
                     sol.p * s.b * s.b.transpose() * sol.p + q;
  CHECK(r.norm() <= 1e-8 * q.norm());
  CHECK((sol.p - sol.p.transpose()).norm() <= 1e-12 * sol.p.norm());
  CHECK(min_eigenvalue(sol.p) >= 0.0);
  const MatrixXd oracle = care_by_hamiltonian(gen.a_red, s.b, q);
  CHECK((oracle - sol.p).norm() <= 1e-8 * sol.p.norm());
  CHECK(sol.open_loop_abscissa < 0.0);
  CHECK(sol.closed_loop_abscissa < sol.open_loop_abscissa);
  CHECK((sol.gain + s.b.transpose() * sol.p).norm() <= 1e-14 * sol.p.norm());

  std::mt19937 rng(5);
  const double horizon = 10.0 / std::abs(sol.open_loop_abscissa);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorXd z0 = random_vector(gen.reduced_size(), rng);
    const CostResult c = simulate_costs(gen, s, sol, z0, horizon, 1e-3);
    CHECK(c.closed_loop <= c.zero_control);
    CHECK(c.closed_loop == doctest::Approx(z0.dot(sol.p * z0)).epsilon(1e-3));
  }
}

TEST_CASE("zero input gives the observability Gramian") {
  const Generator& gen = small_generator();
  ControlSetup s = build_point_control(gen, {{0.5, 0.5}}, {1.0});
  s.b.setZero();
  const RiccatiSolution sol = solve_lqr(gen, s);
  const MatrixXd gram = solve_lyapunov(gen.a_red, s.observation.transpose() * s.observation);
  CHECK((sol.p - gram).norm() <= 1e-10 * gram.norm());
  CHECK(sol.gain.norm() == 0.0);
  CHECK(sol.closed_loop_abscissa == doctest::Approx(sol.open_loop_abscissa).epsilon(1e-12));

  std::mt19937 rng(8);
  const VectorXd z0 = random_vector(gen.reduced_size(), rng);
  const CostResult c = simulate_costs(gen, s, sol, z0, 30.0, 1e-3);
  CHECK(c.closed_loop == doctest::Approx(c.zero_control).epsilon(1e-14));
  CHECK(c.zero_control == doctest::Approx(z0.dot(gram * z0)).epsilon(1e-3));
}

TEST_CASE("finite horizon approaches the stationary solution") {
  const Generator& gen = small_generator();
  const ControlSetup s = build_point_control(gen, {{0.3, 0.5}}, {1.0});
  const RiccatiSolution inf = solve_lqr(gen, s);
  const double horizon = 10.0 / std::abs(inf.open_loop_abscissa);
  const RiccatiSolution fin = solve_lqr(gen, s, horizon, 400);
  REQUIRE(fin.trajectory.size() == 401);
  CHECK(fin.trajectory.back().norm() == 0.0);
  CHECK((fin.p - inf.p).norm() <= 0.05 * inf.p.norm());
  for (const MatrixXd& p : fin.trajectory) CHECK(min_eigenvalue(p) >= -1e-10 * inf.p.norm());
  // P(0) grows with the horizon in the semidefinite order, up to the
  // midpoint rule's slowly damped oscillation in stiff modes.
  MatrixXd previous = MatrixXd::Zero(inf.p.rows(), inf.p.cols());
  for (double fraction : {0.125, 0.25, 0.5, 1.0}) {
    const double dt = horizon / 400.0;
    const RiccatiSolution part = solve_lqr(gen, s, fraction * horizon,
                                           static_cast<int>(std::lround(fraction * horizon / dt)));
    CHECK(min_eigenvalue(part.p - previous) >= -1e-6 * inf.p.norm());
    CHECK(min_eigenvalue(inf.p - part.p) >= -1e-6 * inf.p.norm());
    previous = part.p;
  }
  std::ostringstream csv;
  write_riccati_csv(csv, fin);
  CHECK(csv.str().rfind("t,trace_P\n", 0) == 0);
}

TEST_CASE("boundary control") {
  const Generator& gen = small_generator();
  const Discretization& d = *gen.disc;
  const auto& s_faces = d.topology.s_faces();
  const ControlSetup s = build_boundary_control(gen, {0, 2});
  REQUIRE(s.controls() == 2);
  const double area = d.fluid.face_area;
  for (Index j = 0; j < 2; ++j) {
    const VectorXd data = s.boundary_data.col(j);
    const Index face = s_faces[s.sigma[j]];
    const double out = d.topology.face_normal(face)[d.topology.face_component(face)];
    CHECK(area * data[face] * out == doctest::Approx(area));
    const VectorXd div = d.fluid.divergence * data;
    CHECK(std::abs(div.sum()) * d.fluid.cell_volume <= 1e-13);  // no net flux
    for (Index f : d.topology.omega_faces()) CHECK(data[f] == 0.0);
    const auto lift = StokesSolver(gen.disc).solve(VectorXd::Zero(d.fluid_size()), data);
    CHECK(std::abs(lift.flux_defect) <= 1e-12);
  }
  CHECK((s.b * VectorXd::Zero(2)).norm() == 0.0);

  // <B g, z>_M from the plate load, against (g, B* z)_U.
  std::mt19937 rng(21);
  const Index np = d.plate_size();
  for (int trial = 0; trial < 5; ++trial) {
    const VectorXd g = random_vector(2, rng);
    const VectorXd z = random_vector(gen.reduced_size(), rng);
    const VectorXd x = gen.expand<double>(z);
    const double lhs = d.plate.node_area * (s.plate_forcing * g).dot(x.tail(np));
    const double rhs = s.u_weight * g.dot(s.adjoint(z));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }

  const RiccatiSolution sol = solve_lqr(gen, s);
  CHECK(sol.residual <= 1e-8);
  CHECK(sol.closed_loop_abscissa <= sol.open_loop_abscissa + 1e-10);

  CHECK_THROWS_AS(build_boundary_control(gen, {}), ConfigError);
  CHECK_THROWS_AS(build_boundary_control(gen, {static_cast<Index>(s_faces.size())}), ConfigError);
  CHECK_THROWS_AS(build_boundary_control(gen, {1, 1}), ConfigError);
  std::vector<Index> all(s_faces.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<Index>(k);
  CHECK_THROWS_AS(build_boundary_control(gen, all), ConfigError);
}

TEST_CASE("plate observation") {
  const Generator& gen = small_generator();
  const MatrixXd r = plate_observation(gen);
  std::mt19937 rng(2);
  const VectorXd z = random_vector(gen.reduced_size(), rng);
  const RealState y = gen.state_of<double>(z);
  const Discretization& d = *gen.disc;
  const double area = d.plate.node_area;
  const double plate_energy = area * y.w1.dot(d.plate.bilaplacian * y.w1) +
                              area * y.w2.dot(d.plate.inertia * y.w2);
  CHECK((r * z).squaredNorm() == doctest::Approx(plate_energy).epsilon(1e-12));
}
