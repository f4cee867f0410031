#include "fibergen/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fibergen/element.hpp"
#include "fibergen/error.hpp"

namespace fibergen {

namespace {

constexpr double kBarycentricTolerance = 1e-10;

struct Candidate {
  std::array<double, 8> weights{};
  double distance = std::numeric_limits<double>::infinity();
  bool inside = false;
};

Candidate try_tet(std::span<const Vec3, 4> nodes, const Vec3& p) {
  Candidate c;
  auto lambda = element::tet_barycentric(nodes, p);
  c.inside = std::all_of(lambda.begin(), lambda.end(), [](double l) { return l >= -kBarycentricTolerance; });
  double sum = 0.0;
  for (auto& l : lambda) sum += (l = std::max(l, 0.0));
  Vec3 q;
  for (int i = 0; i < 4; ++i) {
    c.weights[i] = lambda[i] / sum;
    q += c.weights[i] * nodes[i];
  }
  c.distance = c.inside ? 0.0 : norm(q - p);
  return c;
}

Candidate try_hex(std::span<const Vec3, 8> nodes, const Vec3& p) {
  Vec3 xi;
  for (int it = 0; it < 30; ++it) {
    const Vec3 r = element::hex_map(nodes, xi) - p;
    const Mat3 j = element::hex_jacobian(nodes, xi);
    const double d = det(j);
    if (!(std::abs(d) > 0.0)) break;
    const Vec3 step = mul(inverse(j, d), r);
    xi -= step;
    // Far outside the cell the iteration may wander; keep it bounded.
    for (int a = 0; a < 3; ++a) xi[a] = std::clamp(xi[a], -3.0, 3.0);
    if (norm(step) < 1e-14) break;
  }
  Candidate c;
  c.inside = std::abs(xi.x) <= 1 + kBarycentricTolerance && std::abs(xi.y) <= 1 + kBarycentricTolerance &&
             std::abs(xi.z) <= 1 + kBarycentricTolerance;
  Vec3 clamped;
  for (int a = 0; a < 3; ++a) clamped[a] = std::clamp(xi[a], -1.0, 1.0);
  const auto shape = element::hex_shape(clamped);
  std::copy(shape.begin(), shape.end(), c.weights.begin());
  c.distance = c.inside ? 0.0 : norm(element::hex_map(nodes, clamped) - p);
  return c;
}

}  // namespace

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  const auto verts = mesh.vertices();
  lo_ = hi_ = verts.empty() ? Vec3{} : verts[0];
  for (const auto& v : verts)
    for (int a = 0; a < 3; ++a) {
      lo_[a] = std::min(lo_[a], v[a]);
      hi_[a] = std::max(hi_[a], v[a]);
    }
  tolerance_ = 1e-8 * mesh_statistics(mesh).h_avg;

  // About one cell per bucket on average.
  const double n = std::max<double>(1.0, static_cast<double>(mesh.num_cells()));
  const Vec3 ext = hi_ - lo_;
  const double span = std::max({ext.x, ext.y, ext.z, 1e-300});
  const double cell_size = std::cbrt(std::max(ext.x, span * 1e-3) * std::max(ext.y, span * 1e-3) *
                                     std::max(ext.z, span * 1e-3) / n);
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::clamp(static_cast<int>(ext[a] / cell_size), 1, 256);
    step_[a] = ext[a] > 0 ? ext[a] / dims_[a] : 1.0;
  }

  const std::size_t n_buckets = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::array<int, 6>> ranges(mesh.num_cells());
  offsets_.assign(n_buckets + 1, 0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    Vec3 cmin = mesh.vertex(mesh.cell(c)[0]), cmax = cmin;
    for (VertexId v : mesh.cell(c))
      for (int a = 0; a < 3; ++a) {
        cmin[a] = std::min(cmin[a], mesh.vertex(v)[a]);
        cmax[a] = std::max(cmax[a], mesh.vertex(v)[a]);
      }
    const auto b0 = bucket_of(cmin - Vec3{tolerance_, tolerance_, tolerance_});
    const auto b1 = bucket_of(cmax + Vec3{tolerance_, tolerance_, tolerance_});
    ranges[c] = {b0[0], b0[1], b0[2], b1[0], b1[1], b1[2]};
    for (int i = b0[0]; i <= b1[0]; ++i)
      for (int j = b0[1]; j <= b1[1]; ++j)
        for (int k = b0[2]; k <= b1[2]; ++k) ++offsets_[bucket_index(i, j, k) + 1];
  }
  for (std::size_t b = 0; b < n_buckets; ++b) offsets_[b + 1] += offsets_[b];
  cells_.resize(offsets_.back());
  auto fill = offsets_;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& r = ranges[c];
    for (int i = r[0]; i <= r[3]; ++i)
      for (int j = r[1]; j <= r[4]; ++j)
        for (int k = r[2]; k <= r[5]; ++k) cells_[fill[bucket_index(i, j, k)]++] = static_cast<std::uint32_t>(c);
  }
}

std::size_t PointLocator::bucket_index(int i, int j, int k) const {
  return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
}

std::array<int, 3> PointLocator::bucket_of(const Vec3& p) const {
  std::array<int, 3> b{};
  for (int a = 0; a < 3; ++a)
    b[a] = std::clamp(static_cast<int>(std::floor((p[a] - lo_[a]) / step_[a])), 0, dims_[a] - 1);
  return b;
}

PointLocator::Location PointLocator::locate(const Vec3& p) const {
  const auto b = bucket_of(p);
  const auto bucket = bucket_index(b[0], b[1], b[2]);
  Location loc;
  Candidate best;
  for (std::size_t i = offsets_[bucket]; i < offsets_[bucket + 1]; ++i) {
    const std::size_t c = cells_[i];
    const auto nodes = cell_nodes(mesh_, c);
    Candidate cand = mesh_.kind() == ElementKind::Tet4 ? try_tet(std::span<const Vec3, 4>(nodes.data(), 4), p)
                                                       : try_hex(std::span<const Vec3, 8>(nodes.data(), 8), p);
    if (cand.distance < best.distance) {
      best = cand;
      loc.cell = c;
      if (cand.inside) break;
    }
  }
  if (best.inside || best.distance <= tolerance_) {
    loc.weights = best.weights;
    return loc;
  }
  loc.outside = true;
  loc.nearest = nearest_vertex(mesh_, p);
  return loc;
}

Interpolated locate_and_interpolate(const Mesh& source, const VectorField& field, std::span<const Vec3> points) {
  if (field.size() != source.num_vertices())
    throw Error(Errc::LengthMismatch, "field size does not match the source mesh");
  const PointLocator locator(source);
  Interpolated out;
  out.values.resize(points.size());
  out.outside.assign(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto loc = locator.locate(points[i]);
    out.values[i] = locator.interpolate<Vec3>(loc, field);
    out.outside[i] = loc.outside;
    out.n_outside += loc.outside;
  }
  return out;
}

ScalarField locate_and_interpolate(const Mesh& source, const ScalarField& field, std::span<const Vec3> points,
                                   std::size_t* n_outside) {
  if (field.size() != source.num_vertices())
    throw Error(Errc::LengthMismatch, "field size does not match the source mesh");
  const PointLocator locator(source);
  ScalarField out(points.size());
  std::size_t outside = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto loc = locator.locate(points[i]);
    out[i] = locator.interpolate<double>(loc, field);
    outside += loc.outside;
  }
  if (n_outside) *n_outside = outside;
  return out;
}

SensitivityReport angle_error(const VectorField& a, const VectorField& b) {
  if (a.size() != b.size())
    throw Error(Errc::LengthMismatch, "cannot compare fields of " + std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()) + " vectors");
  SensitivityReport r;
  r.dtheta.resize(a.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double na = norm(a[i]), nb = norm(b[i]);
    // Same angle as acos(|a.b| / |a||b|) without its loss of accuracy near 0.
    const double angle = na > 0 && nb > 0 ? std::atan2(norm(cross(a[i], b[i])), std::abs(dot(a[i], b[i])))
                                          : std::numbers::pi / 2;
    r.dtheta[i] = angle * 180.0 / std::numbers::pi;
    sum += r.dtheta[i];
    r.max_error = std::max(r.max_error, r.dtheta[i]);
  }
  r.avg_error = a.empty() ? 0.0 : sum / static_cast<double>(a.size());
  return r;
}

SensitivityReport compare_fibers(const Mesh& coarse, const VectorField& f_coarse, const Mesh& reference,
                                 const VectorField& f_ref) {
  auto at_ref = locate_and_interpolate(coarse, f_coarse, reference.vertices());
  auto report = angle_error(at_ref.values, f_ref);
  report.n_points_outside = at_ref.n_outside;
  return report;
}

}  // namespace fibergen
