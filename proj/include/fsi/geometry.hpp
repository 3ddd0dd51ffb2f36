#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fsi {

enum class DimMode { analogue2d, box3d };

std::string to_string(DimMode mode);
DimMode dim_mode_from_string(const std::string& name);

/// Unit box cavity with the elastic wall on the top face (top edge in 2-D).
struct GeometryConfig {
  DimMode dim_mode = DimMode::analogue2d;
  int n = 8;  // cells per side

  int dim() const { return dim_mode == DimMode::analogue2d ? 2 : 3; }
  double h() const { return 1.0 / n; }
};

enum class BoundaryPart { S, Omega };
enum class FaceKind : std::uint8_t { interior, S, Omega };

using Point = Eigen::Vector3d;  // third entry unused in 2-D

/// Staggered (MAC) grid. Pressures live at cell centres, velocity component c
/// at faces normal to axis c. The last axis points up; its top boundary faces
/// form Omega. Plate nodes are the vertices of the Omega face grid that do not
/// lie on the edge of Omega (the clamped boundary values are eliminated).
class GridTopology {
 public:
  explicit GridTopology(const GeometryConfig& config);

  const GeometryConfig& config() const { return config_; }
  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }

  Eigen::Index num_cells() const { return num_cells_; }
  Eigen::Index num_faces() const { return num_faces_; }
  Eigen::Index num_plate_nodes() const { return num_plate_nodes_; }

  /// Faces normal to axis `component`, multi-index (i_0, .., i_{d-1}) with
  /// i_component in [0, n] and the other entries in [0, n).
  Eigen::Index face_index(int component, const std::array<int, 3>& idx) const;
  int face_component(Eigen::Index face) const;
  std::array<int, 3> face_multi_index(Eigen::Index face) const;
  Point face_center(Eigen::Index face) const;
  FaceKind face_kind(Eigen::Index face) const { return face_kind_[face]; }
  Point face_normal(Eigen::Index face) const;  // outward normal, boundary faces only

  Eigen::Index cell_index(const std::array<int, 3>& idx) const;
  std::array<int, 3> cell_multi_index(Eigen::Index cell) const;
  Point cell_center(Eigen::Index cell) const;

  /// Plate node multi-index over the first d-1 axes, entries in [1, n-1].
  Eigen::Index plate_index(const std::array<int, 2>& idx) const;
  std::array<int, 2> plate_multi_index(Eigen::Index node) const;
  Point plate_node_position(Eigen::Index node) const;

  const std::vector<Eigen::Index>& interior_faces() const { return interior_faces_; }
  const std::vector<Eigen::Index>& omega_faces() const { return omega_faces_; }
  const std::vector<Eigen::Index>& s_faces() const { return s_faces_; }
  /// Position of a face in interior_faces(), or -1.
  Eigen::Index interior_slot(Eigen::Index face) const { return interior_slot_[face]; }
  /// Position of a face in omega_faces(), or -1.
  Eigen::Index omega_slot(Eigen::Index face) const { return omega_slot_[face]; }

  /// Interface pairing: for each Omega face (in omega_faces() order) the plate
  /// nodes at its corners. Corners on the clamped edge carry no DOF and are
  /// omitted; the face value is the average over all 2^{d-1} corners.
  const std::vector<std::vector<Eigen::Index>>& omega_face_nodes() const {
    return omega_face_nodes_;
  }
  /// Cell directly below each Omega face.
  const std::vector<Eigen::Index>& omega_face_cells() const { return omega_face_cells_; }

  std::size_t boundary_face_count() const { return omega_faces_.size() + s_faces_.size(); }

 private:
  GeometryConfig config_;
  int dim_;
  int n_;
  double h_;
  Eigen::Index num_cells_ = 0;
  Eigen::Index num_faces_ = 0;
  Eigen::Index num_plate_nodes_ = 0;
  std::array<Eigen::Index, 4> component_offset_{};
  std::vector<FaceKind> face_kind_;
  std::vector<Eigen::Index> interior_faces_, omega_faces_, s_faces_;
  std::vector<Eigen::Index> interior_slot_, omega_slot_;
  std::vector<std::vector<Eigen::Index>> omega_face_nodes_;
  std::vector<Eigen::Index> omega_face_cells_;
};

GridTopology build_grid(const GeometryConfig& config);

/// Which part of the boundary a boundary face belongs to. Throws ConfigError
/// for interior faces.
BoundaryPart classify_boundary(const GridTopology& topology, Eigen::Index face_id);

}  // namespace fsi
