#pragma once

// Reference-element geometry for the two supported cell kinds. Hex nodes
// follow the Gmsh/VTK ordering: 0-3 bottom face counter-clockwise, 4-7 top.

#include <array>
#include <span>

#include "fibergen/vec3.hpp"

namespace fibergen::element {

inline constexpr std::array<Vec3, 8> kHexNodes = {{
    {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
    {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1},
}};

inline constexpr std::array<std::array<int, 4>, 6> kHexFaces = {{
    {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7},
}};

inline constexpr std::array<std::array<int, 2>, 12> kHexEdges = {{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

inline constexpr std::array<std::array<int, 3>, 4> kTetFaces = {{
    {0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2},
}};

inline constexpr std::array<std::array<int, 2>, 6> kTetEdges = {{
    {0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3},
}};

/// 2-point Gauss abscissa on [-1, 1]; weights are 1.
inline const double kGauss2 = 0.57735026918962576451;

/// Trilinear shape function values at a reference point.
std::array<double, 8> hex_shape(const Vec3& xi);

/// Reference-space gradients of the trilinear shape functions.
std::array<Vec3, 8> hex_shape_gradients(const Vec3& xi);

/// Jacobian d x / d xi (row a, column b = d x_a / d xi_b) of a trilinear hex.
Mat3 hex_jacobian(std::span<const Vec3, 8> nodes, const Vec3& xi);

/// Physical point for reference coordinates xi.
Vec3 hex_map(std::span<const Vec3, 8> nodes, const Vec3& xi);

/// Volume by 2x2x2 Gauss quadrature of det J (exact for trilinear cells).
double hex_volume(std::span<const Vec3, 8> nodes);

/// Signed volume of a tetrahedron (positive for right-handed ordering).
double tet_volume(std::span<const Vec3, 4> nodes);

/// Gradients of the four barycentric coordinates; returns false for a
/// degenerate tetrahedron.
bool tet_gradients(std::span<const Vec3, 4> nodes, std::array<Vec3, 4>& grads);

/// Barycentric coordinates of p with respect to the tetrahedron.
std::array<double, 4> tet_barycentric(std::span<const Vec3, 4> nodes, const Vec3& p);

}  // namespace fibergen::element
