#include "fibergen/mesh.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_map>

#include "fibergen/element.hpp"
#include "fibergen/error.hpp"
#include "mesh_internal.hpp"

namespace fibergen {

namespace {

double signed_cell_volume(ElementKind kind, std::span<const Vec3> vertices, std::span<const VertexId> ids) {
  if (kind == ElementKind::Tet4) {
    const std::array<Vec3, 4> n{vertices[ids[0]], vertices[ids[1]], vertices[ids[2]], vertices[ids[3]]};
    return element::tet_volume(n);
  }
  std::array<Vec3, 8> n;
  for (int i = 0; i < 8; ++i) n[i] = vertices[ids[i]];
  return element::hex_volume(n);
}

double cell_extent(std::span<const Vec3> vertices, std::span<const VertexId> ids) {
  Vec3 lo = vertices[ids[0]], hi = lo;
  for (VertexId v : ids)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], vertices[v][a]);
      hi[a] = std::max(hi[a], vertices[v][a]);
    }
  return std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
}

void flip(ElementKind kind, std::span<VertexId> ids) {
  if (kind == ElementKind::Tet4) {
    std::swap(ids[1], ids[2]);
  } else {
    std::swap(ids[1], ids[3]);
    std::swap(ids[5], ids[7]);
  }
}

}  // namespace

Mesh::Mesh(ElementKind kind, std::vector<Vec3> vertices, std::vector<VertexId> cells,
           std::vector<VertexId> faces, std::vector<Label> face_labels)
    : kind_(kind),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      faces_(std::move(faces)),
      face_labels_(std::move(face_labels)) {
  const auto npc = static_cast<std::size_t>(vertices_per_cell(kind_));
  const auto npf = static_cast<std::size_t>(vertices_per_face(kind_));
  if (cells_.size() % npc != 0)
    throw Error(Errc::MixedElementKinds, "cell connectivity length is not a multiple of " + std::to_string(npc));
  if (faces_.size() != face_labels_.size() * npf)
    throw Error(Errc::MixedElementKinds, "face connectivity does not match the number of face labels");

  const auto nv = vertices_.size();
  for (VertexId v : cells_)
    if (v >= nv) throw Error(Errc::DanglingIndex, "cell references vertex " + std::to_string(v) + " of " + std::to_string(nv));
  for (VertexId v : faces_)
    if (v >= nv) throw Error(Errc::DanglingIndex, "face references vertex " + std::to_string(v) + " of " + std::to_string(nv));

  for (std::size_t c = 0; c < num_cells(); ++c) {
    std::span<VertexId> ids(cells_.data() + c * npc, npc);
    double vol = signed_cell_volume(kind_, vertices_, ids);
    if (vol < 0.0) {
      flip(kind_, ids);
      vol = signed_cell_volume(kind_, vertices_, ids);
      ++repaired_cells_;
    }
    const double h = cell_extent(vertices_, ids);
    if (!(vol > 1e-14 * h * h * h))
      throw Error(Errc::DegenerateCell, "cell " + std::to_string(c) + " has non-positive volume");
  }

  if (face_labels_.empty()) return;
  std::unordered_map<detail::FaceKey, int, detail::FaceKeyHash> owners;
  owners.reserve(face_labels_.size());
  for (std::size_t f = 0; f < num_faces(); ++f) owners.emplace(detail::make_key(face(f)), 0);
  const auto visit = [&](std::span<const VertexId> ids, const auto& local_faces) {
    for (const auto& lf : local_faces) {
      std::array<VertexId, 4> fv{};
      for (std::size_t i = 0; i < lf.size(); ++i) fv[i] = ids[lf[i]];
      auto it = owners.find(detail::make_key(std::span<const VertexId>(fv.data(), lf.size())));
      if (it != owners.end()) ++it->second;
    }
  };
  for (std::size_t c = 0; c < num_cells(); ++c) {
    if (kind_ == ElementKind::Tet4)
      visit(cell(c), element::kTetFaces);
    else
      visit(cell(c), element::kHexFaces);
  }
  for (std::size_t f = 0; f < num_faces(); ++f) {
    const int count = owners.at(detail::make_key(face(f)));
    if (count != 1)
      throw Error(Errc::InvalidBoundaryFace, "face " + std::to_string(f) + " (label " + std::to_string(face_labels_[f]) +
                                                 ") is a face of " + std::to_string(count) + " cells, expected 1");
  }
}

VertexCells vertex_cells(const Mesh& mesh) {
  VertexCells vc;
  vc.offsets.assign(mesh.num_vertices() + 1, 0);
  for (VertexId v : mesh.cell_connectivity()) ++vc.offsets[v + 1];
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) vc.offsets[i + 1] += vc.offsets[i];
  vc.cells.resize(vc.offsets.back());
  std::vector<std::size_t> cursor(vc.offsets.begin(), vc.offsets.end() - 1);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (VertexId v : mesh.cell(c)) vc.cells[cursor[v]++] = static_cast<std::uint32_t>(c);
  return vc;
}

std::vector<Vec3> cell_nodes(const Mesh& mesh, std::size_t c) {
  std::vector<Vec3> nodes;
  nodes.reserve(8);
  for (VertexId v : mesh.cell(c)) nodes.push_back(mesh.vertex(v));
  return nodes;
}

double cell_volume(const Mesh& mesh, std::size_t c) {
  return signed_cell_volume(mesh.kind(), mesh.vertices(), mesh.cell(c));
}

double total_volume(const Mesh& mesh) {
  double v = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) v += cell_volume(mesh, c);
  return v;
}

double face_area(const Mesh& mesh, std::size_t f) {
  const auto ids = mesh.face(f);
  if (ids.size() == 3)
    return 0.5 * norm(cross(mesh.vertex(ids[1]) - mesh.vertex(ids[0]), mesh.vertex(ids[2]) - mesh.vertex(ids[0])));
  double area = 0.0;
  for (double s : {-element::kGauss2, element::kGauss2})
    for (double t : {-element::kGauss2, element::kGauss2}) {
      // bilinear map over [-1,1]^2 with corners in cyclic order
      const Vec3 du = 0.25 * ((1 - t) * (mesh.vertex(ids[1]) - mesh.vertex(ids[0])) +
                              (1 + t) * (mesh.vertex(ids[2]) - mesh.vertex(ids[3])));
      const Vec3 dv = 0.25 * ((1 - s) * (mesh.vertex(ids[3]) - mesh.vertex(ids[0])) +
                              (1 + s) * (mesh.vertex(ids[2]) - mesh.vertex(ids[1])));
      area += norm(cross(du, dv));
    }
  return area;
}

Mesh scale_mesh(const Mesh& mesh, double factor) {
  if (!(factor > 0.0)) throw Error(Errc::NonPositiveFactor, "mesh scaling factor must be positive, got " + std::to_string(factor));
  std::vector<Vec3> vertices(mesh.vertices().begin(), mesh.vertices().end());
  for (auto& p : vertices) p *= factor;
  return Mesh(mesh.kind(), std::move(vertices), {mesh.cell_connectivity().begin(), mesh.cell_connectivity().end()},
              {mesh.face_connectivity().begin(), mesh.face_connectivity().end()},
              {mesh.face_labels().begin(), mesh.face_labels().end()});
}

namespace {

Mesh refine_once(const Mesh& mesh) {
  std::vector<Vec3> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::unordered_map<detail::FaceKey, VertexId, detail::FaceKeyHash> midpoints;
  midpoints.reserve(mesh.num_cells() * 6);

  // Vertex at the average of the given corners, shared through its key.
  const auto midpoint = [&](std::span<const VertexId> corners) -> VertexId {
    auto [it, inserted] = midpoints.try_emplace(detail::make_key(corners), 0);
    if (inserted) {
      Vec3 p;
      for (VertexId v : corners) p += vertices[v];
      p *= 1.0 / static_cast<double>(corners.size());
      it->second = static_cast<VertexId>(vertices.size());
      vertices.push_back(p);
    }
    return it->second;
  };

  // Lattice position (0,1,2)^3 -> hex corner index for the even positions.
  const auto corner_index = [](int i, int j, int k) {
    static constexpr int table[2][2][2] = {{{0, 4}, {3, 7}}, {{1, 5}, {2, 6}}};
    return table[i / 2][j / 2][k / 2];
  };

  std::vector<VertexId> cells;
  cells.reserve(mesh.cell_connectivity().size() * 8);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto ids = mesh.cell(c);
    VertexId lattice[3][3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          // Corners averaged by lattice node (i,j,k): both ends along axes at 1.
          const std::array<int, 2> ri{i == 1 ? 0 : i, i == 1 ? 2 : i};
          const std::array<int, 2> rj{j == 1 ? 0 : j, j == 1 ? 2 : j};
          const std::array<int, 2> rk{k == 1 ? 0 : k, k == 1 ? 2 : k};
          std::array<VertexId, 8> corners{};
          std::size_t n = 0;
          for (int a = 0; a < (i == 1 ? 2 : 1); ++a)
            for (int b = 0; b < (j == 1 ? 2 : 1); ++b)
              for (int d = 0; d < (k == 1 ? 2 : 1); ++d) corners[n++] = ids[corner_index(ri[a], rj[b], rk[d])];
          if (n == 1) {
            lattice[i][j][k] = corners[0];
          } else if (n == 8) {
            Vec3 p;
            for (VertexId v : corners) p += vertices[v];
            lattice[i][j][k] = static_cast<VertexId>(vertices.size());
            vertices.push_back(p * 0.125);
          } else {
            lattice[i][j][k] = midpoint(std::span<const VertexId>(corners.data(), n));
          }
        }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d)
          for (const Vec3& r : element::kHexNodes)
            cells.push_back(lattice[a + (r.x > 0)][b + (r.y > 0)][d + (r.z > 0)]);
  }

  std::vector<VertexId> faces;
  std::vector<Label> labels;
  faces.reserve(mesh.face_connectivity().size() * 4);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const auto q = mesh.face(f);
    const VertexId ab = midpoint(std::array<VertexId, 2>{q[0], q[1]});
    const VertexId bc = midpoint(std::array<VertexId, 2>{q[1], q[2]});
    const VertexId cd = midpoint(std::array<VertexId, 2>{q[2], q[3]});
    const VertexId da = midpoint(std::array<VertexId, 2>{q[3], q[0]});
    const VertexId ctr = midpoint(q);
    for (const auto& child : {std::array<VertexId, 4>{q[0], ab, ctr, da}, std::array<VertexId, 4>{ab, q[1], bc, ctr},
                              std::array<VertexId, 4>{ctr, bc, q[2], cd}, std::array<VertexId, 4>{da, ctr, cd, q[3]}}) {
      faces.insert(faces.end(), child.begin(), child.end());
      labels.push_back(mesh.face_label(f));
    }
  }
  return Mesh(ElementKind::Hex8, std::move(vertices), std::move(cells), std::move(faces), std::move(labels));
}

}  // namespace

Mesh refine_hex_uniform(const Mesh& mesh, int n_steps) {
  if (n_steps < 0) throw Error(Errc::NotHexMesh, "number of refinement steps must be non-negative");
  if (n_steps == 0) return mesh;
  if (mesh.kind() != ElementKind::Hex8)
    throw Error(Errc::NotHexMesh, "uniform refinement is only available for hexahedral meshes");
  Mesh refined = refine_once(mesh);
  for (int s = 1; s < n_steps; ++s) refined = refine_once(refined);
  return refined;
}

std::vector<VertexId> boundary_vertices_with_labels(const Mesh& mesh, std::span<const Label> labels) {
  std::vector<VertexId> out;
  if (labels.empty()) return out;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    if (std::find(labels.begin(), labels.end(), mesh.face_label(f)) == labels.end()) continue;
    const auto ids = mesh.face(f);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

VertexId nearest_vertex(const Mesh& mesh, const Vec3& point) {
  if (mesh.num_vertices() == 0) throw Error(Errc::EmptyMesh, "cannot search an empty mesh");
  VertexId best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3 d = mesh.vertex(v) - point;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<VertexId>(v);
    }
  }
  return best;
}

MeshStats mesh_statistics(const Mesh& mesh) {
  if (mesh.num_cells() == 0) throw Error(Errc::EmptyMesh, "mesh has no cells");
  MeshStats s;
  s.n_elements = mesh.num_cells();
  s.n_vertices = mesh.num_vertices();
  s.h_min = std::numeric_limits<double>::infinity();
  s.h_max = 0.0;
  double h_sum = 0.0;
  const auto edges = [&](std::size_t c, auto&& fn) {
    const auto ids = mesh.cell(c);
    if (mesh.kind() == ElementKind::Tet4)
      for (const auto& e : element::kTetEdges) fn(norm(mesh.vertex(ids[e[1]]) - mesh.vertex(ids[e[0]])));
    else
      for (const auto& e : element::kHexEdges) fn(norm(mesh.vertex(ids[e[1]]) - mesh.vertex(ids[e[0]])));
  };
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    edges(c, [&](double len) {
      lo = std::min(lo, len);
      hi = std::max(hi, len);
    });
    s.h_min = std::min(s.h_min, hi);
    s.h_max = std::max(s.h_max, hi);
    h_sum += hi;
    s.quality_max = std::max(s.quality_max, hi / lo);
  }
  s.h_avg = h_sum / static_cast<double>(s.n_elements);
  return s;
}

Mesh renumber_vertices(const Mesh& mesh, std::span<const VertexId> permutation) {
  std::vector<Vec3> vertices(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) vertices[permutation[v]] = mesh.vertex(v);
  std::vector<VertexId> cells(mesh.cell_connectivity().begin(), mesh.cell_connectivity().end());
  for (auto& v : cells) v = permutation[v];
  std::vector<VertexId> faces(mesh.face_connectivity().begin(), mesh.face_connectivity().end());
  for (auto& v : faces) v = permutation[v];
  return Mesh(mesh.kind(), std::move(vertices), std::move(cells), std::move(faces),
              {mesh.face_labels().begin(), mesh.face_labels().end()});
}

}  // namespace fibergen
