#include "fsi/geometry.hpp"

#include "fsi/errors.hpp"

namespace fsi {

std::string to_string(DimMode mode) {
  return mode == DimMode::analogue2d ? "analogue2d" : "box3d";
}

DimMode dim_mode_from_string(const std::string& name) {
  if (name == "analogue2d") return DimMode::analogue2d;
  if (name == "box3d") return DimMode::box3d;
  throw ConfigError("geometry.dim_mode must be 'analogue2d' or 'box3d', got '" + name + "'");
}

GridTopology::GridTopology(const GeometryConfig& config)
    : config_(config), dim_(config.dim()), n_(config.n), h_(1.0 / config.n) {
  if (n_ < 2) throw ConfigError("geometry.n must be >= 2, got " + std::to_string(n_));

  num_cells_ = 1;
  for (int k = 0; k < dim_; ++k) num_cells_ *= n_;
  const Eigen::Index per_component = num_cells_ / n_ * (n_ + 1);
  for (int c = 0; c <= dim_; ++c) component_offset_[c] = c * per_component;
  num_faces_ = dim_ * per_component;

  num_plate_nodes_ = 1;
  for (int k = 0; k + 1 < dim_; ++k) num_plate_nodes_ *= (n_ - 1);

  const int top = dim_ - 1;
  face_kind_.resize(num_faces_);
  interior_slot_.assign(num_faces_, -1);
  omega_slot_.assign(num_faces_, -1);
  for (Eigen::Index f = 0; f < num_faces_; ++f) {
    const int c = face_component(f);
    const auto idx = face_multi_index(f);
    if (idx[c] > 0 && idx[c] < n_) {
      face_kind_[f] = FaceKind::interior;
      interior_slot_[f] = static_cast<Eigen::Index>(interior_faces_.size());
      interior_faces_.push_back(f);
    } else if (c == top && idx[c] == n_) {
      face_kind_[f] = FaceKind::Omega;
      omega_slot_[f] = static_cast<Eigen::Index>(omega_faces_.size());
      omega_faces_.push_back(f);
    } else {
      face_kind_[f] = FaceKind::S;
      s_faces_.push_back(f);
    }
  }

  // Corner nodes of each Omega face: vertex indices (i..i+1) along each
  // in-plane axis; only those strictly inside [1, n-1] are plate DOFs.
  for (Eigen::Index f : omega_faces_) {
    const auto idx = face_multi_index(f);
    std::vector<Eigen::Index> nodes;
    const int corners = 1 << (dim_ - 1);
    for (int m = 0; m < corners; ++m) {
      std::array<int, 2> v{1, 1};
      bool interior = true;
      for (int k = 0; k + 1 < dim_; ++k) {
        v[k] = idx[k] + ((m >> k) & 1);
        if (v[k] < 1 || v[k] > n_ - 1) interior = false;
      }
      if (interior) nodes.push_back(plate_index(v));
    }
    omega_face_nodes_.push_back(std::move(nodes));
    std::array<int, 3> cell = idx;
    cell[top] = n_ - 1;
    omega_face_cells_.push_back(cell_index(cell));
  }
}

Eigen::Index GridTopology::face_index(int component, const std::array<int, 3>& idx) const {
  Eigen::Index linear = 0;
  for (int k = dim_ - 1; k >= 0; --k) {
    const int extent = (k == component) ? n_ + 1 : n_;
    linear = linear * extent + idx[k];
  }
  return component_offset_[component] + linear;
}

int GridTopology::face_component(Eigen::Index face) const {
  int c = 0;
  while (face >= component_offset_[c + 1]) ++c;
  return c;
}

std::array<int, 3> GridTopology::face_multi_index(Eigen::Index face) const {
  const int c = face_component(face);
  Eigen::Index linear = face - component_offset_[c];
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    const int extent = (k == c) ? n_ + 1 : n_;
    idx[k] = static_cast<int>(linear % extent);
    linear /= extent;
  }
  return idx;
}

Point GridTopology::face_center(Eigen::Index face) const {
  const int c = face_component(face);
  const auto idx = face_multi_index(face);
  Point p = Point::Zero();
  for (int k = 0; k < dim_; ++k) p[k] = (k == c ? idx[k] : idx[k] + 0.5) * h_;
  return p;
}

Point GridTopology::face_normal(Eigen::Index face) const {
  const int c = face_component(face);
  const auto idx = face_multi_index(face);
  Point nu = Point::Zero();
  if (idx[c] == 0) nu[c] = -1.0;
  else if (idx[c] == n_) nu[c] = 1.0;
  return nu;
}

Eigen::Index GridTopology::cell_index(const std::array<int, 3>& idx) const {
  Eigen::Index linear = 0;
  for (int k = dim_ - 1; k >= 0; --k) linear = linear * n_ + idx[k];
  return linear;
}

std::array<int, 3> GridTopology::cell_multi_index(Eigen::Index cell) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<int>(cell % n_);
    cell /= n_;
  }
  return idx;
}

Point GridTopology::cell_center(Eigen::Index cell) const {
  const auto idx = cell_multi_index(cell);
  Point p = Point::Zero();
  for (int k = 0; k < dim_; ++k) p[k] = (idx[k] + 0.5) * h_;
  return p;
}

Eigen::Index GridTopology::plate_index(const std::array<int, 2>& idx) const {
  Eigen::Index linear = 0;
  for (int k = dim_ - 2; k >= 0; --k) linear = linear * (n_ - 1) + (idx[k] - 1);
  return linear;
}

std::array<int, 2> GridTopology::plate_multi_index(Eigen::Index node) const {
  std::array<int, 2> idx{1, 1};
  for (int k = 0; k + 1 < dim_; ++k) {
    idx[k] = static_cast<int>(node % (n_ - 1)) + 1;
    node /= (n_ - 1);
  }
  return idx;
}

Point GridTopology::plate_node_position(Eigen::Index node) const {
  const auto idx = plate_multi_index(node);
  Point p = Point::Zero();
  for (int k = 0; k + 1 < dim_; ++k) p[k] = idx[k] * h_;
  p[dim_ - 1] = 1.0;
  return p;
}

GridTopology build_grid(const GeometryConfig& config) { return GridTopology(config); }

BoundaryPart classify_boundary(const GridTopology& topology, Eigen::Index face_id) {
  if (face_id < 0 || face_id >= topology.num_faces())
    throw ConfigError("face id out of range: " + std::to_string(face_id));
  switch (topology.face_kind(face_id)) {
    case FaceKind::Omega: return BoundaryPart::Omega;
    case FaceKind::S: return BoundaryPart::S;
    case FaceKind::interior: break;
  }
  throw ConfigError("face " + std::to_string(face_id) + " is not a boundary face");
}

}  // namespace fsi
