#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fibergen/vec3.hpp"

namespace fibergen {

enum class ElementKind { Tet4, Hex8 };

using VertexId = std::uint32_t;
using Label = int;

constexpr int vertices_per_cell(ElementKind kind) { return kind == ElementKind::Tet4 ? 4 : 8; }
constexpr int vertices_per_face(ElementKind kind) { return kind == ElementKind::Tet4 ? 3 : 4; }

/// Labeled volumetric mesh of a single element kind.
///
/// Construction validates the connectivity, repairs inverted cells by
/// reordering their vertices and checks that every labeled face is a face of
/// exactly one cell. A Mesh is immutable afterwards.
class Mesh {
 public:
  Mesh(ElementKind kind, std::vector<Vec3> vertices, std::vector<VertexId> cells,
       std::vector<VertexId> faces, std::vector<Label> face_labels);

  ElementKind kind() const noexcept { return kind_; }
  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_cells() const noexcept { return cells_.size() / vertices_per_cell(kind_); }
  std::size_t num_faces() const noexcept { return face_labels_.size(); }

  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }

  std::span<const VertexId> cell(std::size_t c) const {
    const auto n = static_cast<std::size_t>(vertices_per_cell(kind_));
    return std::span<const VertexId>(cells_).subspan(c * n, n);
  }
  std::span<const VertexId> face(std::size_t f) const {
    const auto n = static_cast<std::size_t>(vertices_per_face(kind_));
    return std::span<const VertexId>(faces_).subspan(f * n, n);
  }
  Label face_label(std::size_t f) const { return face_labels_[f]; }

  std::span<const VertexId> cell_connectivity() const noexcept { return cells_; }
  std::span<const VertexId> face_connectivity() const noexcept { return faces_; }
  std::span<const Label> face_labels() const noexcept { return face_labels_; }

  /// Number of cells whose vertex order was flipped during construction.
  std::size_t repaired_cells() const noexcept { return repaired_cells_; }

 private:
  ElementKind kind_;
  std::vector<Vec3> vertices_;
  std::vector<VertexId> cells_;
  std::vector<VertexId> faces_;
  std::vector<Label> face_labels_;
  std::size_t repaired_cells_ = 0;
};

struct MeshStats {
  double h_min = 0.0;
  double h_avg = 0.0;
  double h_max = 0.0;
  std::size_t n_elements = 0;
  std::size_t n_vertices = 0;
  double quality_max = 1.0;
};

/// Vertex-to-cell incidence in compressed row form.
struct VertexCells {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> cells;

  std::span<const std::uint32_t> of(std::size_t v) const {
    return std::span<const std::uint32_t>(cells).subspan(offsets[v], offsets[v + 1] - offsets[v]);
  }
};

VertexCells vertex_cells(const Mesh& mesh);

/// Corner coordinates of cell c (4 or 8 entries).
std::vector<Vec3> cell_nodes(const Mesh& mesh, std::size_t c);
double cell_volume(const Mesh& mesh, std::size_t c);
double total_volume(const Mesh& mesh);
/// Area of boundary face f (bilinear quads integrated with 2x2 Gauss).
double face_area(const Mesh& mesh, std::size_t f);

Mesh scale_mesh(const Mesh& mesh, double factor);

/// Splits every hex into eight, n_steps times. Boundary faces are split into
/// four children that inherit the parent label.
Mesh refine_hex_uniform(const Mesh& mesh, int n_steps);

/// Sorted, duplicate-free vertex indices of all faces carrying one of labels.
std::vector<VertexId> boundary_vertices_with_labels(const Mesh& mesh, std::span<const Label> labels);

/// Closest vertex to point; ties go to the smallest index.
VertexId nearest_vertex(const Mesh& mesh, const Vec3& point);

/// Edge-based size and quality: h of a cell is its longest edge and its
/// quality is longest / shortest edge.
MeshStats mesh_statistics(const Mesh& mesh);

/// Permutes vertex numbering: new index of old vertex v is permutation[v].
Mesh renumber_vertices(const Mesh& mesh, std::span<const VertexId> permutation);

}  // namespace fibergen
