#include "fsi/operators.hpp"

#include <cmath>
#include <vector>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SparseMatrix select_rows(const SparseMatrix& m, const std::vector<Index>& rows) {
  std::vector<Triplet> t;
  const SparseMatrix mt = m.transpose();  // column access to original rows
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (SparseMatrix::InnerIterator it(mt, rows[r]); it; ++it)
      t.emplace_back(static_cast<Index>(r), it.row(), it.value());
  return from_triplets(static_cast<Index>(rows.size()), m.cols(), t);
}

}  // namespace

FluidOperators assemble_fluid_ops(const GridTopology& topo) {
  FluidOperators ops;
  const int d = topo.dim();
  const int n = topo.n();
  const double h = topo.h();
  ops.h = h;
  ops.dim = d;
  ops.cell_volume = std::pow(h, d);
  ops.face_area = std::pow(h, d - 1);
  const double link = std::pow(h, d - 2);
  const Index nf = topo.num_faces();

  std::vector<Triplet> k;
  auto add_link = [&](Index a, Index b, double w) {
    k.emplace_back(a, a, w);
    k.emplace_back(b, b, w);
    k.emplace_back(a, b, -w);
    k.emplace_back(b, a, -w);
  };
  for (Index f = 0; f < nf; ++f) {
    const int c = topo.face_component(f);
    const auto idx = topo.face_multi_index(f);
    const bool on_boundary = idx[c] == 0 || idx[c] == n;
    for (int dir = 0; dir < d; ++dir) {
      if (dir == c) {
        if (idx[c] < n) {
          auto next = idx;
          ++next[c];
          add_link(f, topo.face_index(c, next), link);
        }
        continue;
      }
      // Tangential direction: boundary faces only own half a control volume.
      const double w = on_boundary ? 0.5 * link : link;
      if (idx[dir] + 1 < n) {
        auto next = idx;
        ++next[dir];
        add_link(f, topo.face_index(c, next), w);
      }
      if (idx[dir] == 0) k.emplace_back(f, f, 2.0 * w);
      if (idx[dir] == n - 1) k.emplace_back(f, f, 2.0 * w);
    }
  }
  ops.stiffness = from_triplets(nf, nf, k);

  std::vector<Triplet> div;
  for (Index cell = 0; cell < topo.num_cells(); ++cell) {
    const auto idx = topo.cell_multi_index(cell);
    for (int c = 0; c < d; ++c) {
      auto upper = idx;
      ++upper[c];
      div.emplace_back(cell, topo.face_index(c, upper), 1.0 / h);
      div.emplace_back(cell, topo.face_index(c, idx), -1.0 / h);
    }
  }
  ops.divergence = from_triplets(topo.num_cells(), nf, div);

  const auto& interior = topo.interior_faces();
  std::vector<Triplet> grad;
  for (std::size_t s = 0; s < interior.size(); ++s) {
    const Index f = interior[s];
    const int c = topo.face_component(f);
    auto idx = topo.face_multi_index(f);
    const Index above = topo.cell_index(idx);
    --idx[c];
    const Index below = topo.cell_index(idx);
    grad.emplace_back(static_cast<Index>(s), above, 1.0 / h);
    grad.emplace_back(static_cast<Index>(s), below, -1.0 / h);
  }
  ops.gradient = from_triplets(static_cast<Index>(interior.size()), topo.num_cells(), grad);

  ops.laplacian = select_rows(ops.stiffness, interior) * (-1.0 / ops.cell_volume);

  std::vector<Triplet> om, st;
  for (std::size_t s = 0; s < topo.omega_faces().size(); ++s)
    om.emplace_back(static_cast<Index>(s), topo.omega_faces()[s], 1.0);
  for (std::size_t s = 0; s < topo.s_faces().size(); ++s)
    st.emplace_back(static_cast<Index>(s), topo.s_faces()[s], 1.0);
  ops.omega_trace = from_triplets(static_cast<Index>(topo.omega_faces().size()), nf, om);
  ops.s_trace = from_triplets(static_cast<Index>(topo.s_faces().size()), nf, st);
  return ops;
}

VectorXd PlateOperators::mean_projection(const VectorXd& w) const {
  return w.array() - w.mean();
}

PlateOperators assemble_plate_ops(const GridTopology& topo, double rho) {
  if (!(rho >= 0.0)) throw ConfigError("physics.rho must be >= 0, got " + std::to_string(rho));
  PlateOperators ops;
  const int pd = topo.dim() - 1;
  const int n = topo.n();
  const double h = topo.h();
  ops.h = h;
  ops.plate_dim = pd;
  ops.rho = rho;
  ops.node_area = std::pow(h, pd);
  const Index np = topo.num_plate_nodes();

  // Vertices of Omega: (n+1)^pd, multi-index in [0, n].
  Index nv = 1;
  for (int k = 0; k < pd; ++k) nv *= (n + 1);
  auto vertex_multi = [&](Index v) {
    std::array<int, 2> idx{0, 0};
    for (int k = 0; k < pd; ++k) {
      idx[k] = static_cast<int>(v % (n + 1));
      v /= (n + 1);
    }
    return idx;
  };
  // Plate DOF for a (possibly ghost) vertex after mirroring, or -1 on the edge.
  auto dof_of = [&](std::array<int, 2> idx) -> Index {
    for (int k = 0; k < pd; ++k) {
      if (idx[k] == -1) idx[k] = 1;
      if (idx[k] == n + 1) idx[k] = n - 1;
      if (idx[k] <= 0 || idx[k] >= n) return -1;
    }
    return topo.plate_index(idx);
  };

  std::vector<Triplet> lb, ad;
  ops.trapezoid_weights.resize(nv);
  for (Index v = 0; v < nv; ++v) {
    const auto idx = vertex_multi(v);
    double weight = 1.0;
    for (int k = 0; k < pd; ++k)
      if (idx[k] == 0 || idx[k] == n) weight *= 0.5;
    ops.trapezoid_weights[v] = weight;
    const Index self = dof_of(idx);
    for (int k = 0; k < pd; ++k) {
      for (int step : {-1, 1}) {
        auto nb = idx;
        nb[k] += step;
        const Index dof = dof_of(nb);
        if (dof >= 0) lb.emplace_back(v, dof, 1.0 / (h * h));
        if (self >= 0 && dof >= 0) ad.emplace_back(self, dof, -1.0 / (h * h));
      }
      if (self >= 0) {
        lb.emplace_back(v, self, -2.0 / (h * h));
        ad.emplace_back(self, self, 2.0 / (h * h));
      }
    }
  }
  ops.boundary_laplacian = from_triplets(nv, np, lb);
  ops.dirichlet_laplacian = from_triplets(np, np, ad);

  SparseMatrix identity(np, np);
  identity.setIdentity();
  ops.inertia = identity + rho * ops.dirichlet_laplacian;
  ops.bilaplacian = ops.boundary_laplacian.transpose() * ops.trapezoid_weights.asDiagonal() *
                    ops.boundary_laplacian;
  ops.bilaplacian.makeCompressed();

  std::vector<Triplet> e;
  const double corner_weight = 1.0 / static_cast<double>(1 << pd);
  const auto& face_nodes = topo.omega_face_nodes();
  for (std::size_t f = 0; f < face_nodes.size(); ++f)
    for (Index node : face_nodes[f]) e.emplace_back(static_cast<Index>(f), node, corner_weight);
  ops.interface = from_triplets(static_cast<Index>(face_nodes.size()), np, e);
  return ops;
}

EnergyMetric assemble_energy_metric(const GridTopology& topo, const FluidOperators& fluid,
                                    const PlateOperators& plate) {
  EnergyMetric metric;
  metric.grid = topo.config();
  metric.rho = plate.rho;
  metric.fluid_size = static_cast<Index>(topo.interior_faces().size());
  metric.plate_size = plate.size();
  const Index nu = metric.fluid_size;
  const Index np = metric.plate_size;

  std::vector<Triplet> t;
  for (Index i = 0; i < nu; ++i) t.emplace_back(i, i, fluid.cell_volume);
  const SparseMatrix kp = plate.node_area * plate.bilaplacian;
  const SparseMatrix mp = plate.node_area * plate.inertia;
  for (Index col = 0; col < np; ++col) {
    for (SparseMatrix::InnerIterator it(kp, col); it; ++it)
      t.emplace_back(nu + it.row(), nu + col, it.value());
    for (SparseMatrix::InnerIterator it(mp, col); it; ++it)
      t.emplace_back(nu + np + it.row(), nu + np + col, it.value());
  }
  metric.mass = from_triplets(nu + 2 * np, nu + 2 * np, t);
  return metric;
}

}  // namespace fsi
