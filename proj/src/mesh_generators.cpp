#include "fibergen/mesh_generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <tuple>

#include "fibergen/error.hpp"

namespace fibergen {

namespace {

/// Quadrilateral surface that is extruded through cell layers.
struct Surface {
  std::vector<Vec3> points;  // parametric or geometric, interpreted by the caller
  std::vector<std::array<VertexId, 4>> quads;
  struct Edge {
    VertexId a, b;
    Label label;
  };
  std::vector<Edge> boundary;  // edges of an open surface
};

using PositionFn = std::function<Vec3(VertexId surface_vertex, int layer)>;
using CapLabelFn = std::function<Label(std::size_t quad, bool top)>;

void append_prism_tets(const std::array<VertexId, 6>& in, std::vector<VertexId>& cells) {
  std::array<VertexId, 6> v = in;
  const auto m = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  if (m >= 3) v = {v[3], v[4], v[5], v[0], v[1], v[2]};
  for (int r = 0; r < m % 3; ++r) v = {v[1], v[2], v[0], v[4], v[5], v[3]};
  const std::array<std::array<int, 4>, 3> split_a{{{0, 1, 2, 5}, {0, 1, 5, 4}, {0, 4, 5, 3}}};
  const std::array<std::array<int, 4>, 3> split_b{{{0, 1, 2, 4}, {0, 4, 2, 5}, {0, 4, 5, 3}}};
  const auto& split = std::min(v[1], v[5]) < std::min(v[2], v[4]) ? split_a : split_b;
  for (const auto& t : split)
    for (int i : t) cells.push_back(v[i]);
}

/// Quad (a,b,c,d) cut along the diagonal through its lowest index.
std::array<std::array<VertexId, 3>, 2> split_quad(const std::array<VertexId, 4>& q) {
  const auto m = static_cast<int>(std::min_element(q.begin(), q.end()) - q.begin());
  if (m % 2 == 0) return {{{q[0], q[1], q[2]}, {q[0], q[2], q[3]}}};
  return {{{q[1], q[2], q[3]}, {q[1], q[3], q[0]}}};
}

Mesh extrude(const Surface& surface, int n_layers, const PositionFn& position, const CapLabelFn& cap_label,
             ElementKind kind) {
  const auto ns = static_cast<VertexId>(surface.points.size());
  const auto gid = [ns](VertexId s, int layer) { return static_cast<VertexId>(layer) * ns + s; };

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(ns) * (n_layers + 1));
  for (int l = 0; l <= n_layers; ++l)
    for (VertexId s = 0; s < ns; ++s) vertices.push_back(position(s, l));

  std::vector<VertexId> cells, faces;
  std::vector<Label> labels;
  const auto add_face = [&](std::initializer_list<VertexId> ids, Label label) {
    faces.insert(faces.end(), ids);
    labels.push_back(label);
  };

  for (std::size_t qi = 0; qi < surface.quads.size(); ++qi) {
    const auto& q = surface.quads[qi];
    if (kind == ElementKind::Hex8) {
      for (int l = 0; l < n_layers; ++l)
        for (int top = 0; top < 2; ++top)
          for (VertexId s : q) cells.push_back(gid(s, l + top));
      add_face({gid(q[0], 0), gid(q[1], 0), gid(q[2], 0), gid(q[3], 0)}, cap_label(qi, false));
      add_face({gid(q[0], n_layers), gid(q[1], n_layers), gid(q[2], n_layers), gid(q[3], n_layers)},
               cap_label(qi, true));
    } else {
      for (const auto& t : split_quad(q)) {
        for (int l = 0; l < n_layers; ++l)
          append_prism_tets({gid(t[0], l), gid(t[1], l), gid(t[2], l), gid(t[0], l + 1), gid(t[1], l + 1), gid(t[2], l + 1)},
                            cells);
        add_face({gid(t[0], 0), gid(t[1], 0), gid(t[2], 0)}, cap_label(qi, false));
        add_face({gid(t[0], n_layers), gid(t[1], n_layers), gid(t[2], n_layers)}, cap_label(qi, true));
      }
    }
  }

  for (const auto& e : surface.boundary) {
    for (int l = 0; l < n_layers; ++l) {
      const std::array<VertexId, 4> q{gid(e.a, l), gid(e.b, l), gid(e.b, l + 1), gid(e.a, l + 1)};
      if (kind == ElementKind::Hex8) {
        add_face({q[0], q[1], q[2], q[3]}, e.label);
      } else {
        for (const auto& t : split_quad(q)) add_face({t[0], t[1], t[2]}, e.label);
      }
    }
  }
  return Mesh(kind, std::move(vertices), std::move(cells), std::move(faces), std::move(labels));
}

/// Cubed-sphere lattice on the surface of [0,n]^3. With lower_half set only
/// the part with k <= n/2 is kept; its rim edges are reported as boundary.
struct CubeSurface {
  Surface surface;
  std::vector<std::array<int, 3>> lattice;  // per surface vertex
};

CubeSurface cube_surface(int n, bool lower_half, const std::function<Label(const Vec3& rim_dir)>& rim_label) {
  CubeSurface out;
  std::map<std::array<int, 3>, VertexId> ids;
  const auto id = [&](std::array<int, 3> p) {
    auto [it, inserted] = ids.try_emplace(p, static_cast<VertexId>(out.lattice.size()));
    if (inserted) out.lattice.push_back(p);
    return it->second;
  };
  const int kmax = lower_half ? n / 2 : n;
  // Each face: fixed axis, fixed value, two running axes.
  for (int axis = 0; axis < 3; ++axis) {
    for (int side : {0, n}) {
      if (lower_half && axis == 2 && side == n) continue;
      const int u = (axis + 1) % 3, w = (axis + 2) % 3;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          std::array<std::array<int, 3>, 4> corners{};
          const int du[4] = {0, 1, 1, 0}, dw[4] = {0, 0, 1, 1};
          bool keep = true;
          for (int c = 0; c < 4; ++c) {
            corners[c][axis] = side;
            corners[c][u] = a + du[c];
            corners[c][w] = b + dw[c];
            if (corners[c][2] > kmax) keep = false;
          }
          if (!keep) continue;
          std::array<VertexId, 4> q{};
          for (int c = 0; c < 4; ++c) q[c] = id(corners[c]);
          out.surface.quads.push_back(q);
        }
    }
  }
  out.surface.points.resize(out.lattice.size());
  for (std::size_t i = 0; i < out.lattice.size(); ++i) {
    Vec3 c;
    for (int a = 0; a < 3; ++a) c[a] = std::tan(0.25 * std::numbers::pi * (-1.0 + 2.0 * out.lattice[i][a] / n));
    out.surface.points[i] = c * (1.0 / norm(c));
  }
  if (lower_half) {
    // Rim: horizontal edges at k = n/2 on the four side faces.
    for (const auto& q : out.surface.quads)
      for (int e = 0; e < 4; ++e) {
        const VertexId a = q[e], b = q[(e + 1) % 4];
        if (out.lattice[a][2] == kmax && out.lattice[b][2] == kmax) {
          const Vec3 mid = out.surface.points[a] + out.surface.points[b];
          out.surface.boundary.push_back({a, b, rim_label(mid)});
        }
      }
  }
  return out;
}

Vec3 quad_direction(const Surface& s, std::size_t q) {
  Vec3 c;
  for (VertexId v : s.quads[q]) c += s.points[v];
  return c * (1.0 / norm(c));
}

}  // namespace

Mesh generate_slab_mesh(const Vec3& extent, std::array<int, 3> divisions, ElementKind kind) {
  for (int d : divisions)
    if (d < 1) throw Error(Errc::EmptyMesh, "slab divisions must be at least 1");
  const int nx = divisions[0], ny = divisions[1], nz = divisions[2];
  Surface s;
  const auto sid = [ny](int i, int j) { return static_cast<VertexId>(i * (ny + 1) + j); };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) s.points.push_back({extent.x * i / nx, extent.y * j / ny, 0.0});
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) s.quads.push_back({sid(i, j), sid(i + 1, j), sid(i + 1, j + 1), sid(i, j + 1)});
  for (int j = 0; j < ny; ++j) {
    s.boundary.push_back({sid(0, j), sid(0, j + 1), slab_labels::endo});
    s.boundary.push_back({sid(nx, j), sid(nx, j + 1), slab_labels::epi});
  }
  for (int i = 0; i < nx; ++i) {
    s.boundary.push_back({sid(i, 0), sid(i + 1, 0), slab_labels::lateral});
    s.boundary.push_back({sid(i, ny), sid(i + 1, ny), slab_labels::lateral});
  }
  return extrude(
      s, nz,
      [&](VertexId v, int l) {
        Vec3 p = s.points[v];
        p.z = l == nz ? extent.z : extent.z * l / nz;
        if (v / (ny + 1) == static_cast<VertexId>(nx)) p.x = extent.x;
        if (v % (ny + 1) == static_cast<VertexId>(ny)) p.y = extent.y;
        return p;
      },
      [](std::size_t, bool top) { return top ? slab_labels::base_up : slab_labels::base_down; }, kind);
}

Mesh generate_shell_mesh(double r_inner, double r_outer, int n_surface, int n_layers, ElementKind kind) {
  if (!(r_inner > 0.0 && r_outer > r_inner) || n_surface < 1 || n_layers < 1)
    throw Error(Errc::EmptyMesh, "invalid shell dimensions");
  const auto cube = cube_surface(n_surface, false, {});
  return extrude(
      cube.surface, n_layers,
      [&](VertexId v, int l) {
        const double r = l == n_layers ? r_outer : r_inner + (r_outer - r_inner) * l / n_layers;
        return cube.surface.points[v] * r;
      },
      [](std::size_t, bool top) { return top ? shell_labels::epi : shell_labels::endo; }, kind);
}

Mesh generate_ventricle_mesh(const VentricleShape& shape) {
  if (shape.n_surface < 2 || shape.n_surface % 2 != 0 || shape.n_layers < 1)
    throw Error(Errc::EmptyMesh, "ventricle mesh needs an even surface resolution and at least one layer");
  const auto rim = [&](const Vec3& dir) {
    if (!shape.complete) return ventricle_labels::base;
    const double deg = std::abs(std::atan2(dir.y, dir.x)) * 180.0 / std::numbers::pi;
    if (deg < 40.0) return ventricle_labels::av;
    if (deg > 70.0) return ventricle_labels::mv;
    return ventricle_labels::base_other;
  };
  const auto cube = cube_surface(shape.n_surface, true, rim);
  const int nl = shape.n_layers;
  return extrude(
      cube.surface, nl,
      [&](VertexId v, int l) {
        const double t = static_cast<double>(l) / nl;
        const double a = shape.inner_radius + t * (shape.outer_radius - shape.inner_radius);
        const double c = shape.inner_depth + t * (shape.outer_depth - shape.inner_depth);
        const Vec3& d = cube.surface.points[v];
        return Vec3{a * d.x, a * d.y, c * d.z};
      },
      [](std::size_t, bool top) { return top ? ventricle_labels::epi : ventricle_labels::endo; }, shape.kind);
}

Mesh generate_atrium_mesh(double r_inner, double r_outer, int n_surface, int n_layers, ElementKind kind) {
  if (!(r_inner > 0.0 && r_outer > r_inner) || n_surface < 1 || n_layers < 1)
    throw Error(Errc::EmptyMesh, "invalid atrium dimensions");
  const auto cube = cube_surface(n_surface, false, {});
  const double s = std::sqrt(0.5);
  const Vec3 mv_dir{0, 0, -1}, lpv_dir{0, s, s}, rpv_dir{0, -s, s};
  const double mv_cos = std::cos(35.0 * std::numbers::pi / 180.0);
  const double pv_cos = std::cos(20.0 * std::numbers::pi / 180.0);
  return extrude(
      cube.surface, n_layers,
      [&](VertexId v, int l) {
        const double r = l == n_layers ? r_outer : r_inner + (r_outer - r_inner) * l / n_layers;
        return cube.surface.points[v] * r;
      },
      [&](std::size_t q, bool top) {
        if (!top) return atrium_labels::endo;
        const Vec3 d = quad_direction(cube.surface, q);
        if (dot(d, mv_dir) > mv_cos) return atrium_labels::mv;
        if (dot(d, lpv_dir) > pv_cos) return atrium_labels::lpv;
        if (dot(d, rpv_dir) > pv_cos) return atrium_labels::rpv;
        return atrium_labels::epi;
      },
      kind);
}

}  // namespace fibergen
