#include <cmath>
#include <random>

#include "drivers.hpp"
#include "fibergen/analysis.hpp"
#include "support.hpp"

using namespace fibergen;

namespace {

VectorField linear_field(const Mesh& m) {
  VectorField f(m.num_vertices());
  for (std::size_t v = 0; v < f.size(); ++v) {
    const Vec3& p = m.vertex(v);
    f[v] = {1 + 2 * p.x - p.y, 3 * p.z, p.x + p.y + p.z};
  }
  return f;
}

}  // namespace

TEST_CASE("queries at vertices return the vertex value") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Mesh m = generate_shell_mesh(1.0, 1.5, 3, 2, kind);
    VectorField f(m.num_vertices());
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    for (auto& v : f) v = {g(rng), g(rng), g(rng)};
    const std::vector<Vec3> pts(m.vertices().begin(), m.vertices().end());
    const auto r = locate_and_interpolate(m, f, pts);
    CHECK(r.n_outside == 0);
    for (std::size_t v = 0; v < pts.size(); ++v) CHECK(norm(r.values[v] - f[v]) < 1e-12);
  }
}

TEST_CASE("linear fields are reproduced inside cells") {
  // Tets are exact everywhere; hexes with parallel faces map affinely.
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Mesh m = generate_slab_mesh({2, 1, 1.5}, {3, 4, 2}, kind);
    const auto f = linear_field(m);
    std::vector<Vec3> centroids;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      Vec3 s{};
      for (const auto& p : cell_nodes(m, c)) s = s + p;
      centroids.push_back(s * (1.0 / vertices_per_cell(kind)));
    }
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) centroids.push_back({2 * u(rng), u(rng), 1.5 * u(rng)});
    const auto r = locate_and_interpolate(m, f, centroids);
    CHECK(r.n_outside == 0);
    for (std::size_t i = 0; i < centroids.size(); ++i) {
      const Vec3& p = centroids[i];
      CHECK(norm(r.values[i] - Vec3{1 + 2 * p.x - p.y, 3 * p.z, p.x + p.y + p.z}) < 1e-10);
    }
  }
}

TEST_CASE("curved hex cells invert the trilinear map") {
  const Mesh m = generate_shell_mesh(1.0, 2.0, 3, 2, ElementKind::Hex8);
  PointLocator loc(m);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 300; ++i) {
    const std::size_t c = static_cast<std::size_t>(u(rng) * m.num_cells()) % m.num_cells();
    const auto nodes = cell_nodes(m, c);
    // Random trilinear image of a reference point of cell c.
    const double xi[3] = {2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
    std::array<double, 8> w{};
    Vec3 p{};
    for (int a = 0; a < 8; ++a) {
      const double sx = (a == 0 || a == 3 || a == 4 || a == 7) ? -1 : 1;
      const double sy = (a == 0 || a == 1 || a == 4 || a == 5) ? -1 : 1;
      const double sz = a < 4 ? -1 : 1;
      w[a] = (1 + sx * xi[0]) * (1 + sy * xi[1]) * (1 + sz * xi[2]) / 8;
      p = p + w[a] * nodes[a];
    }
    const auto l = loc.locate(p);
    REQUIRE_FALSE(l.outside);
    // The point may sit in a neighbor; the interpolated position must match.
    Vec3 q{};
    const auto cell = m.cell(l.cell);
    for (int a = 0; a < 8; ++a) q = q + l.weights[a] * m.vertex(cell[a]);
    CHECK(norm(q - p) < 1e-10);
  }
}

TEST_CASE("points outside the mesh fall back to the nearest vertex") {
  const Mesh m = generate_slab_mesh({1, 1, 1}, {2, 2, 2}, ElementKind::Tet4);
  const auto f = linear_field(m);
  const std::vector<Vec3> pts{{1.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {1 + 1e-12, 0.25, 0.25}};
  const auto r = locate_and_interpolate(m, f, pts);
  CHECK(r.n_outside == 1);
  CHECK(r.outside[0]);
  CHECK_FALSE(r.outside[1]);
  CHECK_FALSE(r.outside[2]);
  CHECK(r.values[0] == f[nearest_vertex(m, pts[0])]);

  ScalarField s(m.num_vertices(), 2.0);
  std::size_t n_out = 0;
  const auto v = locate_and_interpolate(m, s, pts, &n_out);
  CHECK(n_out == 1);
  for (double x : v) CHECK(x == doctest::Approx(2.0));
}

TEST_CASE("interpolated unit fibers keep near-unit length") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Vec3 ext{0.02, 0.03, 0.01};
    const Mesh m = generate_slab_mesh(ext, {4, 4, 4}, kind);
    const auto r = generate_fibers(m, test::slab_config());
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Vec3> pts(1000);
    for (auto& p : pts) p = {ext.x * u(rng), ext.y * u(rng), ext.z * u(rng)};
    const auto i = locate_and_interpolate(m, r.f, pts);
    CHECK(i.n_outside == 0);
    for (const auto& v : i.values) {
      CHECK(norm(v) >= 0.9);
      CHECK(norm(v) <= 1.1);
    }
  }
}

TEST_CASE("angle error") {
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  VectorField a(500), b(500), neg(500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = {g(rng), g(rng), g(rng)};
    b[i] = {g(rng), g(rng), g(rng)};
    neg[i] = -2.5 * a[i];
  }
  const auto same = angle_error(a, a);
  CHECK(same.avg_error == 0.0);
  CHECK(same.max_error == 0.0);
  const auto flipped = angle_error(a, neg);
  CHECK(flipped.max_error < 1e-6);

  const auto ab = angle_error(a, b);
  const auto ba = angle_error(b, a);
  CHECK(ab.dtheta == ba.dtheta);
  CHECK(ab.avg_error <= ab.max_error);
  CHECK(ab.max_error <= 90.0);
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double c = std::abs(dot(a[i], b[i])) / (norm(a[i]) * norm(b[i]));
    CHECK(ab.dtheta[i] == doctest::Approx(std::acos(std::min(1.0, c)) * 180 / M_PI));
    sum += ab.dtheta[i];
  }
  CHECK(ab.avg_error == doctest::Approx(sum / a.size()));

  CHECK(angle_error({{1, 0, 0}}, {{0, 1, 0}}).max_error == doctest::Approx(90.0));
  CHECK(angle_error({{1, 0, 0}}, {{1, 1, 0}}).max_error == doctest::Approx(45.0));
  CHECK_ERRC(angle_error(a, VectorField(3)), Errc::LengthMismatch);
}

TEST_CASE("compare on nested meshes") {
  const Vec3 ext{0.02, 0.03, 0.01};
  const Mesh coarse = generate_slab_mesh(ext, {2, 3, 1}, ElementKind::Hex8);
  const Mesh fine = refine_hex_uniform(coarse, 1);
  const auto rc = generate_fibers(coarse, test::slab_config());
  const auto rf = generate_fibers(fine, test::slab_config());
  const auto rep = compare_fibers(coarse, rc.f, fine, rf.f);
  CHECK(rep.dtheta.size() == fine.num_vertices());
  CHECK(rep.n_points_outside == 0);
  CHECK(rep.max_error >= rep.avg_error);
  // Self-comparison is exact.
  CHECK(compare_fibers(fine, rf.f, fine, rf.f).max_error < 1e-6);
}
