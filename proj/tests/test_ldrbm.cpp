#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "drivers.hpp"
#include "fibergen/fem.hpp"
#include "support.hpp"

using namespace fibergen;

namespace {

constexpr double kDeg = M_PI / 180.0;

// Rotation matrix about a unit axis, written out entry by entry.
Mat3 rotation_matrix(const Vec3& u, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
  Mat3 r{};
  r[0] = {t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y};
  r[1] = {t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x};
  r[2] = {t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c};
  return r;
}

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Vec3 v{g(rng), g(rng), g(rng)};
  return v * (1.0 / norm(v));
}

double max_diff(const VectorField& a, const VectorField& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, norm(a[i] - b[i]));
  return d;
}

bool on_boundary(const Mesh& m, std::size_t v) {
  static thread_local const Mesh* cached = nullptr;
  static thread_local std::vector<char> flags;
  if (cached != &m) {
    flags.assign(m.num_vertices(), 0);
    for (auto w : m.face_connectivity()) flags[w] = 1;
    cached = &m;
  }
  return flags[v];
}

}  // namespace

TEST_CASE("local frame from canonical axes") {
  const auto q = local_frame({1, 0, 0}, {0, 0, 1});
  CHECK(q.e_t == Vec3{1, 0, 0});
  CHECK(q.e_n == Vec3{0, 0, 1});
  CHECK(q.e_l == Vec3{0, 1, 0});

  bool fallback = false;
  const auto p = local_frame({1, 0, 0}, {3, 0, 0}, &fallback);
  CHECK(fallback);
  CHECK(std::abs(dot(p.e_n, p.e_t)) < 1e-15);
  CHECK(norm(p.e_n) == doctest::Approx(1.0));
  CHECK(norm(cross(p.e_l, p.e_n) - Vec3{0, 0, 0}) > 0.5);
}

TEST_CASE("local frames are orthonormal for random inputs") {
  std::mt19937 rng(42);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 t = random_unit(rng);
    const Vec3 k = random_unit(rng) * 3.0;
    const auto q = local_frame(t, k);
    const Mat3 m{{{q.e_l.x, q.e_l.y, q.e_l.z}, {q.e_n.x, q.e_n.y, q.e_n.z}, {q.e_t.x, q.e_t.y, q.e_t.z}}};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double qtq = 0;
        for (int c = 0; c < 3; ++c) qtq += m[a][c] * m[b][c];
        REQUIRE(std::abs(qtq - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
    REQUIRE(triple(q.e_l, q.e_n, q.e_t) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("build_frame fallbacks") {
  const Mesh m = generate_slab_mesh({1, 1, 1}, {2, 2, 2}, ElementKind::Hex8);
  const std::size_t n = m.num_vertices();
  VectorField grad(n, Vec3{1, 0, 0}), k(n, Vec3{0, 0, 1});
  grad[13] = {0, 0, 0};  // center vertex
  FrameStats stats;
  auto frame = build_frame(m, grad, k, &stats);
  CHECK(stats.transmural_fallbacks == 1);
  CHECK(stats.transmural_axis_fallbacks == 0);
  CHECK(norm(frame.e_t[13] - Vec3{1, 0, 0}) < 1e-14);

  VectorField none(n, Vec3{0, 0, 0});
  FrameStats all;
  frame = build_frame(m, none, k, &all);
  CHECK(all.transmural_axis_fallbacks == n);
  // +z transmural with k along +z leaves no usable normal component.
  CHECK(all.normal_fallbacks == n);
  for (std::size_t v = 0; v < n; ++v) {
    CHECK(frame.e_t[v] == Vec3{0, 0, 1});
    CHECK(std::abs(dot(frame.e_n[v], frame.e_t[v])) < 1e-15);
  }
}

TEST_CASE("rotate_frame matches explicit rotation matrices") {
  const LocalFrame canon{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  auto t = rotate_frame(canon, 0, 0);
  CHECK(t.f == canon.e_l);
  CHECK(t.n == canon.e_n);
  CHECK(t.s == canon.e_t);

  t = rotate_frame(canon, 90, 0);
  CHECK(norm(t.f - Vec3{0, 0, 1}) < 1e-15);

  t = rotate_frame(canon, 30, 0);
  CHECK(std::acos(dot(t.f, canon.e_l)) / kDeg == doctest::Approx(30.0).epsilon(1e-11));
  CHECK(std::abs(dot(t.f, canon.e_t)) < 1e-15);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-180, 180);
  for (int i = 0; i < 1000; ++i) {
    const auto q = local_frame(random_unit(rng), random_unit(rng));
    const double a = ang(rng), b = ang(rng);
    const Mat3 ra = rotation_matrix(q.e_t, a * kDeg);
    const Vec3 f = mul(ra, q.e_l), n1 = mul(ra, q.e_n);
    const Mat3 rb = rotation_matrix(f, b * kDeg);
    const auto got = rotate_frame(q, a, b);
    REQUIRE(norm(got.f - f) < 1e-12);
    REQUIRE(norm(got.n - mul(rb, n1)) < 1e-12);
    REQUIRE(norm(got.s - mul(rb, q.e_t)) < 1e-12);
    // Helical angle measured in the (e_l, e_n) plane, sheetlet angle from e_t.
    const double helical = std::atan2(dot(got.f, q.e_n), dot(got.f, q.e_l)) / kDeg;
    REQUIRE(helical == doctest::Approx(a).epsilon(1e-10));
    REQUIRE(dot(got.s, q.e_t) == doctest::Approx(std::cos(b * kDeg)).epsilon(1e-12));
  }
}

TEST_CASE("angle laws") {
  const AngleSet slab = test::slab_angles();
  auto [a0, b0] = angle_laws(0.0, slab);
  CHECK(a0 == 60.0);
  CHECK(b0 == -45.0);
  auto [a1, b1] = angle_laws(1.0, slab);
  CHECK(a1 == -60.0);
  CHECK(b1 == 45.0);
  CHECK(angle_laws(0.5, slab).first == 0.0);
  CHECK(angle_laws(0.25, slab).first == doctest::Approx(30.0));
  // Solver noise outside [0, 1] is clamped.
  CHECK(angle_laws(-1e-9, slab).first == 60.0);
  CHECK(angle_laws(1.0 + 1e-9, slab).second == 45.0);

  const AngleSet lv = test::complete_ventricle_config().angles;
  CHECK(angle_laws(0.0, lv, 0.0).first == 90.0);
  CHECK(angle_laws(0.0, lv, 1.0).first == 60.0);
  CHECK(angle_laws(1.0, lv, 0.5).first == doctest::Approx(-30.0));
  CHECK(angle_laws(0.0, lv, 0.5).second == doctest::Approx(-10.0));
}

TEST_CASE("normal_rl") {
  const Mesh m = test::ventricle_mesh(false, ElementKind::Tet4);
  const auto k = normal_rl(m, {0, 0, 1});
  REQUIRE(k.size() == m.num_vertices());
  for (const auto& v : k) CHECK(v == Vec3{0, 0, 1});
  CHECK_ERRC(normal_rl(m, {0, 0, 0}), Errc::ZeroVector);

  VectorField grad(m.num_vertices(), Vec3{1, 0, 0});
  const auto a = build_frame(m, grad, normal_rl(m, {0, 0, 1}));
  const auto b = build_frame(m, grad, normal_rl(m, {0, 0, 2}));
  CHECK(max_diff(a.e_n, b.e_n) == 0.0);
}

TEST_CASE("transmural potential") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Mesh m = generate_slab_mesh({2, 1, 1}, {4, 3, 3}, kind);
    const HarmonicSolver h(m);
    const std::vector<Label> endo{slab_labels::endo}, epi{slab_labels::epi}, none{99};
    const auto phi = transmural_potential(h, endo, epi);
    for (std::size_t v = 0; v < m.num_vertices(); ++v) CHECK(std::abs(phi[v] - m.vertex(v).x / 2) < 1e-10);
    CHECK_ERRC(transmural_potential(h, none, epi), Errc::EmptyBoundarySet);
    CHECK_ERRC(transmural_potential(h, {}, epi), Errc::EmptyBoundarySet);
  }
}

TEST_CASE("bi-ventricular style apex-to-base normal") {
  const Mesh m = generate_slab_mesh({1, 1, 3}, {4, 4, 12}, ElementKind::Hex8);
  const HarmonicSolver h(m);
  const std::vector<Label> base{slab_labels::base_up};
  const auto bt = normal_bt(h, base, {0, 0, 0});
  CHECK(bt.apex_vertex == nearest_vertex(m, {0, 0, 0}));
  std::size_t mid = 0, up = 0;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    CHECK(bt.psi[v] >= -1e-12);
    CHECK(bt.psi[v] <= 1 + 1e-12);
    if (std::abs(m.vertex(v).z - 3.0) < 1e-12) CHECK(bt.psi[v] == 1.0);
    if (std::abs(m.vertex(v).z - 1.5) < 1e-12) {
      ++mid;
      up += bt.k[v].z > 0;
    }
  }
  REQUIRE(mid > 0);
  CHECK(up > 0.95 * mid);

  // An apex far outside the mesh snaps to the nearest vertex.
  const auto far = normal_bt(h, base, {-10, -10, -10});
  CHECK(far.apex_vertex == bt.apex_vertex);

  const std::vector<Label> missing{99};
  CHECK_ERRC(normal_bt(h, missing, {0, 0, 0}), Errc::EmptyBoundarySet);
}

TEST_CASE("Doste normal blends two apico-basal gradients") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Mesh m = test::ventricle_mesh(true, kind);
    const HarmonicSolver h(m);
    const std::vector<Label> mv{ventricle_labels::mv}, av{ventricle_labels::av};
    const auto d = normal_doste(h, mv, av, {0, 0, -0.06});
    const auto g_ab = nodal_gradient(m, d.psi_ab);
    const auto g_ot = nodal_gradient(m, d.psi_ot);
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      CHECK(d.w[v] >= -1e-12);
      CHECK(d.w[v] <= 1 + 1e-12);
      CHECK(norm(d.k[v]) <= std::max(norm(g_ab[v]), norm(g_ot[v])) * (1 + 1e-12));
    }
    for (auto v : boundary_vertices_with_labels(m, mv)) CHECK(norm(d.k[v] - g_ab[v]) <= 1e-12 * norm(g_ab[v]));
    for (auto v : boundary_vertices_with_labels(m, av)) CHECK(norm(d.k[v] - g_ot[v]) <= 1e-12 * norm(g_ot[v]));
    CHECK(d.w[d.apex_vertex] == 1.0);

    const std::vector<Label> overlap{ventricle_labels::mv, ventricle_labels::epi};
    const std::vector<Label> epi{ventricle_labels::epi};
    CHECK_ERRC(normal_doste(h, overlap, epi, {0, 0, -0.06}), Errc::OverlappingRings);
    const std::vector<Label> missing{99};
    CHECK_ERRC(normal_doste(h, mv, missing, {0, 0, -0.06}), Errc::EmptyBoundarySet);
  }
}

TEST_CASE("atrial bundles") {
  const Mesh m = generate_atrium_mesh(0.02, 0.025, 8, 2, ElementKind::Tet4);
  const HarmonicSolver h(m);
  GeometryConfig c = test::atrium_config();
  auto a = atrial_normals(h, c);
  std::array<std::size_t, 4> count{};
  for (int b : a.bundle) ++count.at(b);
  for (auto n : count) CHECK(n > 0);
  for (auto v : boundary_vertices_with_labels(m, c.mv)) CHECK(a.bundle[v] == static_cast<int>(Bundle::MitralValve));
  for (auto v : boundary_vertices_with_labels(m, c.lpv)) CHECK(a.psi_v[v] == 1.0);
  for (auto v : boundary_vertices_with_labels(m, c.rpv)) CHECK(a.psi_v[v] == 0.0);

  // Apex defaults to the vertex farthest from the mitral ring.
  const auto mv = boundary_vertices_with_labels(m, c.mv);
  double best = 0;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    double d = 1e300;
    for (auto w : mv) d = std::min(d, norm(m.vertex(v) - m.vertex(w)));
    best = std::max(best, d);
  }
  double apex_d = 1e300;
  for (auto w : mv) apex_d = std::min(apex_d, norm(m.vertex(a.apex_vertex) - m.vertex(w)));
  CHECK(apex_d == best);
  CHECK(a.psi_ab[a.apex_vertex] == 0.0);

  c.tau_mv = 1;
  c.tau_lpv = 1;
  c.tau_rpv = 0;
  a = atrial_normals(h, c);
  for (int b : a.bundle) CHECK(b == 0);

  c = test::atrium_config();
  c.appendage = true;
  CHECK_ERRC(atrial_normals(h, c), Errc::MissingApex);
  c.apex = Vec3{0, 0.03, 0};
  a = atrial_normals(h, c);
  CHECK(a.apex_vertex == nearest_vertex(m, *c.apex));

  c = test::atrium_config();
  c.rpv = {99};
  CHECK_ERRC(atrial_normals(h, c), Errc::EmptyBoundarySet);
}

TEST_CASE("every driver yields orthonormal right-handed triads") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8})
    for (auto& c : test::all_driver_cases(kind)) {
      CAPTURE(c.name);
      CAPTURE(static_cast<int>(kind));
      const auto r = generate_fibers(c.mesh, c.config);
      REQUIRE(r.f.size() == c.mesh.num_vertices());
      CHECK(test::triad_defect(r) <= 1e-10);
      CHECK(r.phi.size() == c.mesh.num_vertices());
      if (c.config.kind != GeometryKind::LeftAtrium && !c.config.radial_fibers) {
        // s leaves e_t by exactly the sheetlet angle.
        for (std::size_t v = 0; v < r.s.size(); ++v) {
          const double beta =
              angle_laws(r.phi[v], c.config.angles,
                         r.potential("w") ? std::optional<double>((*r.potential("w"))[v]) : std::nullopt)
                  .second;
          REQUIRE(dot(r.s[v], r.frame.e_t[v]) >= std::cos(std::abs(beta) * kDeg) - 1e-9);
        }
      }
    }
}

TEST_CASE("slab helical angle follows the transmural law") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Vec3 ext{0.02, 0.03, 0.01};
    const Mesh m = generate_slab_mesh(ext, {8, 8, 8}, kind);
    const auto r = generate_fibers(m, test::slab_config());
    // Analytic frame of the slab: e_t = +x, e_n = +z, e_l = +y.
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      const double x = m.vertex(v).x / ext.x;
      const double expected = 60.0 * (1 - x) - 60.0 * x;
      const double measured = std::atan2(r.f[v].z, r.f[v].y) / kDeg;
      if (on_boundary(m, v) && std::abs(m.vertex(v).x) > 1e-12 && std::abs(m.vertex(v).x - ext.x) > 1e-12) continue;
      CHECK(std::abs(measured - expected) < 1.0);
    }
  }
}

TEST_CASE("spherical slab with radial fibers") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Mesh m = generate_shell_mesh(0.02, 0.025, 6, 3, kind);
    const auto r = generate_fibers(m, test::sphere_config(0.025, true));
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      if (on_boundary(m, v)) continue;
      CHECK(dot(r.f[v], m.vertex(v) * (1.0 / norm(m.vertex(v)))) >= 0.99);
    }
    REQUIRE(r.log.size() >= 2);
    CHECK(r.log[0].find("north pole") != std::string::npos);
  }
}

TEST_CASE("atrium returns the unrotated frame") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8}) {
    const Mesh m = generate_atrium_mesh(0.02, 0.025, 8, 2, kind);
    const auto r = generate_fibers(m, test::atrium_config());
    CHECK(r.f == r.frame.e_l);
    CHECK(r.n == r.frame.e_n);
    CHECK(r.s == r.frame.e_t);
    REQUIRE(r.bundle_id.size() == m.num_vertices());
    std::array<std::size_t, 4> count{};
    for (int b : r.bundle_id) ++count.at(b);
    for (auto n : count) CHECK(n > 0);
    CHECK(r.potential("psi_ab"));
    CHECK(r.potential("psi_v"));
    CHECK(r.potential("psi_r"));
  }
}

TEST_CASE("fields are invariant under scaling and renumbering") {
  for (auto kind : {ElementKind::Tet4, ElementKind::Hex8})
    for (auto& c : test::all_driver_cases(kind)) {
      CAPTURE(c.name);
      const auto base = generate_fibers(c.mesh, c.config);

      GeometryConfig scaled_cfg = c.config;
      for (auto* p : {&scaled_cfg.apex, &scaled_cfg.north_pole, &scaled_cfg.south_pole})
        if (*p) **p = **p * 10.0;
      const auto scaled = generate_fibers(scale_mesh(c.mesh, 10.0), scaled_cfg);
      CHECK(max_diff(base.f, scaled.f) < 1e-9);
      CHECK(max_diff(base.n, scaled.n) < 1e-9);
      CHECK(max_diff(base.s, scaled.s) < 1e-9);

      std::vector<VertexId> perm(c.mesh.num_vertices());
      std::iota(perm.begin(), perm.end(), 0);
      std::mt19937 rng(11);
      std::shuffle(perm.begin(), perm.end(), rng);
      const auto shuffled = generate_fibers(renumber_vertices(c.mesh, perm), c.config);
      double d = 0;
      for (std::size_t v = 0; v < perm.size(); ++v)
        d = std::max({d, norm(base.f[v] - shuffled.f[perm[v]]), norm(base.n[v] - shuffled.n[perm[v]]),
                      norm(base.s[v] - shuffled.s[perm[v]])});
      CHECK(d < 1e-9);
    }
}

TEST_CASE("configuration validation") {
  const Mesh m = generate_slab_mesh({1, 1, 1}, {2, 2, 2}, ElementKind::Hex8);
  auto c = test::slab_config();
  c.base_up.clear();
  CHECK_ERRC(generate_fibers(m, c), Errc::LabelRoleMissing);
  c = test::slab_config();
  c.endo.clear();
  CHECK_ERRC(generate_fibers(m, c), Errc::LabelRoleMissing);
  c = test::slab_config();
  c.endo = {99};
  CHECK_ERRC(generate_fibers(m, c), Errc::EmptyBoundarySet);

  auto s = test::sphere_config(1, false);
  s.north_pole.reset();
  CHECK_ERRC(generate_fibers(m, s), Errc::MissingApex);

  auto lv = test::ventricle_config(NormalAlgorithm::BT);
  lv.apex.reset();
  CHECK_ERRC(generate_fibers(m, lv), Errc::MissingApex);

  auto a = test::atrium_config();
  a.tau_mv = 1.5;
  CHECK_ERRC(generate_fibers(m, a), Errc::PatternMismatch);
  a = test::atrium_config();
  a.lpv.clear();
  CHECK_ERRC(generate_fibers(m, a), Errc::LabelRoleMissing);
}
