#include "fibergen/element.hpp"

namespace fibergen::element {

std::array<double, 8> hex_shape(const Vec3& xi) {
  std::array<double, 8> n{};
  for (int i = 0; i < 8; ++i) {
    const Vec3& r = kHexNodes[i];
    n[i] = 0.125 * (1.0 + r.x * xi.x) * (1.0 + r.y * xi.y) * (1.0 + r.z * xi.z);
  }
  return n;
}

std::array<Vec3, 8> hex_shape_gradients(const Vec3& xi) {
  std::array<Vec3, 8> g{};
  for (int i = 0; i < 8; ++i) {
    const Vec3& r = kHexNodes[i];
    const double a = 1.0 + r.x * xi.x;
    const double b = 1.0 + r.y * xi.y;
    const double c = 1.0 + r.z * xi.z;
    g[i] = {0.125 * r.x * b * c, 0.125 * a * r.y * c, 0.125 * a * b * r.z};
  }
  return g;
}

Mat3 hex_jacobian(std::span<const Vec3, 8> nodes, const Vec3& xi) {
  const auto g = hex_shape_gradients(xi);
  Mat3 j{};
  for (int i = 0; i < 8; ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) j[a][b] += nodes[i][a] * g[i][b];
  return j;
}

Vec3 hex_map(std::span<const Vec3, 8> nodes, const Vec3& xi) {
  const auto n = hex_shape(xi);
  Vec3 x;
  for (int i = 0; i < 8; ++i) x += n[i] * nodes[i];
  return x;
}

double hex_volume(std::span<const Vec3, 8> nodes) {
  double v = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Vec3 xi{kHexNodes[k].x * kGauss2, kHexNodes[k].y * kGauss2, kHexNodes[k].z * kGauss2};
    v += det(hex_jacobian(nodes, xi));
  }
  return v;
}

double tet_volume(std::span<const Vec3, 4> nodes) {
  return triple(nodes[1] - nodes[0], nodes[2] - nodes[0], nodes[3] - nodes[0]) / 6.0;
}

bool tet_gradients(std::span<const Vec3, 4> nodes, std::array<Vec3, 4>& grads) {
  const Vec3 e1 = nodes[1] - nodes[0];
  const Vec3 e2 = nodes[2] - nodes[0];
  const Vec3 e3 = nodes[3] - nodes[0];
  const double d = triple(e1, e2, e3);
  if (!(std::abs(d) > 0.0)) return false;
  // Rows of the inverse of [e1 e2 e3] are the gradients of lambda_1..3.
  grads[1] = cross(e2, e3) * (1.0 / d);
  grads[2] = cross(e3, e1) * (1.0 / d);
  grads[3] = cross(e1, e2) * (1.0 / d);
  grads[0] = -(grads[1] + grads[2] + grads[3]);
  return true;
}

std::array<double, 4> tet_barycentric(std::span<const Vec3, 4> nodes, const Vec3& p) {
  const Vec3 e1 = nodes[1] - nodes[0];
  const Vec3 e2 = nodes[2] - nodes[0];
  const Vec3 e3 = nodes[3] - nodes[0];
  const Vec3 r = p - nodes[0];
  const double d = triple(e1, e2, e3);
  const double l1 = triple(r, e2, e3) / d;
  const double l2 = triple(e1, r, e3) / d;
  const double l3 = triple(e1, e2, r) / d;
  return {1.0 - l1 - l2 - l3, l1, l2, l3};
}

}  // namespace fibergen::element
