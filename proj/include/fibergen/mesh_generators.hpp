#pragma once

// Small analytic meshes for tests, demos and the mesh-sensitivity study.
// All generators build a layered (extruded) structure; tetrahedral variants
// split every layer cell into prisms and prisms into three tetrahedra using
// the lowest-global-index diagonal rule, which keeps the split conforming.

#include <array>

#include "fibergen/mesh.hpp"

namespace fibergen {

namespace slab_labels {
inline constexpr Label epi = 10;        // x = Lx
inline constexpr Label endo = 20;       // x = 0
inline constexpr Label base_up = 50;    // z = Lz
inline constexpr Label base_down = 60;  // z = 0
inline constexpr Label lateral = 70;    // y = 0 and y = Ly
}  // namespace slab_labels

/// Box [0,Lx]x[0,Ly]x[0,Lz] with the slab labeling convention above.
Mesh generate_slab_mesh(const Vec3& extent, std::array<int, 3> divisions, ElementKind kind);

namespace shell_labels {
inline constexpr Label epi = 10;
inline constexpr Label endo = 20;
}  // namespace shell_labels

/// Hollow sphere centered at the origin. n_surface is the number of cells
/// along each edge of the cubed-sphere faces, n_layers the number of radial
/// cell layers.
Mesh generate_shell_mesh(double r_inner, double r_outer, int n_surface, int n_layers, ElementKind kind);

namespace ventricle_labels {
inline constexpr Label epi = 10;
inline constexpr Label endo = 20;
inline constexpr Label base = 50;  // whole basal plane (based ventricle)
inline constexpr Label mv = 50;    // mitral ring sector (complete ventricle)
inline constexpr Label av = 60;    // aortic ring sector (complete ventricle)
inline constexpr Label base_other = 70;
}  // namespace ventricle_labels

struct VentricleShape {
  double inner_radius = 0.02;
  double outer_radius = 0.03;
  double inner_depth = 0.05;  // semi-axis along -z of the endocardium
  double outer_depth = 0.06;
  int n_surface = 8;  // even
  int n_layers = 2;
  ElementKind kind = ElementKind::Tet4;
  /// Split the basal plane into mitral and aortic sectors separated by gaps.
  bool complete = false;
};

/// Truncated prolate ellipsoidal shell, z <= 0, base on the plane z = 0 and
/// epicardial apex at (0, 0, -outer_depth).
Mesh generate_ventricle_mesh(const VentricleShape& shape);

namespace atrium_labels {
inline constexpr Label endo = 10;
inline constexpr Label rpv = 20;
inline constexpr Label epi = 30;
inline constexpr Label mv = 40;
inline constexpr Label lpv = 50;
}  // namespace atrium_labels

/// Idealized atrium: spherical shell whose outer surface carries a mitral cap
/// around -z and two pulmonary-vein caps at 45 degrees elevation on +y (left)
/// and -y (right).
Mesh generate_atrium_mesh(double r_inner, double r_outer, int n_surface, int n_layers, ElementKind kind);

}  // namespace fibergen
