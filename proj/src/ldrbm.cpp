#include "fibergen/ldrbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fibergen/error.hpp"

namespace fibergen {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr double kGradientFloor = 1e-12;
constexpr double kNormalFloor = 1e-10;  // on the unit normal direction
constexpr double kAxisTie = 1e-6;

std::vector<VertexId> require_vertices(const Mesh& mesh, std::span<const Label> labels, const char* role) {
  auto vertices = boundary_vertices_with_labels(mesh, labels);
  if (vertices.empty()) {
    std::ostringstream msg;
    msg << "boundary set '" << role << "' is empty (labels:";
    for (Label l : labels) msg << ' ' << l;
    msg << ')';
    throw Error(Errc::EmptyBoundarySet, msg.str());
  }
  return vertices;
}

std::string describe_snap(const char* role, const Vec3& requested, const Mesh& mesh, VertexId v) {
  std::ostringstream msg;
  msg.precision(9);
  const Vec3& p = mesh.vertex(v);
  msg << role << " point (" << requested.x << ", " << requested.y << ", " << requested.z << ") snapped to vertex " << v
      << " at (" << p.x << ", " << p.y << ", " << p.z << ")";
  return msg.str();
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(axis, v) + ((1.0 - c) * dot(axis, v)) * axis;
}

Vec3 normalized(const Vec3& v) { return v * (1.0 / norm(v)); }

/// Vertex farthest from a vertex set (largest distance to its closest member).
VertexId farthest_vertex(const Mesh& mesh, std::span<const VertexId> from) {
  VertexId best = 0;
  double best_d2 = -1.0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    double d2 = std::numeric_limits<double>::infinity();
    for (VertexId u : from) {
      const Vec3 d = mesh.vertex(v) - mesh.vertex(u);
      d2 = std::min(d2, dot(d, d));
    }
    if (d2 > best_d2) {
      best_d2 = d2;
      best = static_cast<VertexId>(v);
    }
  }
  return best;
}

std::vector<VertexId> merged(std::vector<VertexId> a, std::span<const VertexId> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

HarmonicSolver::HarmonicSolver(const Mesh& mesh, SolverOptions options)
    : mesh_(mesh), solver_(mesh), options_(options) {}

ScalarField HarmonicSolver::solve(const LaplaceProblemSpec& spec) const { return solver_.solve(spec, options_); }

ScalarField transmural_potential(const HarmonicSolver& h, std::span<const Label> endo, std::span<const Label> epi) {
  auto endo_v = require_vertices(h.mesh(), endo, "endo");
  auto epi_v = require_vertices(h.mesh(), epi, "epi");
  return h.solve({{{std::move(epi_v), 1.0}, {std::move(endo_v), 0.0}}});
}

VectorField normal_rl(const Mesh& mesh, const Vec3& n_base) {
  if (!(norm(n_base) > 0.0)) throw Error(Errc::ZeroVector, "normal to base must be a non-zero vector");
  return VectorField(mesh.num_vertices(), n_base);
}

namespace {

BtNormal bt_from_sets(const HarmonicSolver& h, std::vector<VertexId> base, std::vector<VertexId> apex) {
  BtNormal out;
  out.apex_vertex = apex.front();
  out.psi = h.solve({{{std::move(base), 1.0}, {std::move(apex), 0.0}}});
  out.k = nodal_gradient(h.mesh(), out.psi);
  return out;
}

}  // namespace

BtNormal normal_bt(const HarmonicSolver& h, std::span<const Label> base, const Vec3& apex) {
  auto base_v = require_vertices(h.mesh(), base, "base");
  const VertexId a = nearest_vertex(h.mesh(), apex);
  return bt_from_sets(h, std::move(base_v), {a});
}

DosteNormal normal_doste(const HarmonicSolver& h, std::span<const Label> mv, std::span<const Label> av, const Vec3& apex) {
  const Mesh& mesh = h.mesh();
  auto mv_v = require_vertices(mesh, mv, "MV");
  auto av_v = require_vertices(mesh, av, "AV");
  std::vector<VertexId> shared;
  std::set_intersection(mv_v.begin(), mv_v.end(), av_v.begin(), av_v.end(), std::back_inserter(shared));
  if (!shared.empty())
    throw Error(Errc::OverlappingRings, "mitral and aortic rings share " + std::to_string(shared.size()) +
                                            " vertices (first: " + std::to_string(shared.front()) + ")");
  const VertexId a = nearest_vertex(mesh, apex);

  DosteNormal out;
  out.apex_vertex = a;
  out.psi_ab = h.solve({{{mv_v, 1.0}, {{a}, 0.0}}});
  out.psi_ot = h.solve({{{av_v, 1.0}, {{a}, 0.0}}});
  out.w = h.solve({{{merged(mv_v, std::array<VertexId, 1>{a}), 1.0}, {av_v, 0.0}}});
  const auto g_ab = nodal_gradient(mesh, out.psi_ab);
  const auto g_ot = nodal_gradient(mesh, out.psi_ot);
  out.k.resize(mesh.num_vertices());
  for (std::size_t v = 0; v < out.k.size(); ++v) out.k[v] = out.w[v] * g_ab[v] + (1.0 - out.w[v]) * g_ot[v];
  return out;
}

AtrialNormal atrial_normals(const HarmonicSolver& h, const GeometryConfig& config) {
  const Mesh& mesh = h.mesh();
  auto mv_v = require_vertices(mesh, config.mv, "MV");
  auto lpv_v = require_vertices(mesh, config.lpv, "LPV");
  auto rpv_v = require_vertices(mesh, config.rpv, "RPV");
  if (config.appendage && !config.apex)
    throw Error(Errc::MissingApex, "atrial appendage enabled but no appendage apex given");

  AtrialNormal out;
  out.apex_vertex = config.appendage ? nearest_vertex(mesh, *config.apex) : farthest_vertex(mesh, mv_v);
  const auto veins = merged(lpv_v, rpv_v);
  out.psi_r = h.solve({{{mv_v, 1.0}, {veins, 0.0}}});
  out.psi_v = h.solve({{{lpv_v, 1.0}, {rpv_v, 0.0}}});
  out.psi_ab = h.solve({{{merged(mv_v, veins), 1.0}, {{out.apex_vertex}, 0.0}}});

  const auto g_ab = nodal_gradient(mesh, out.psi_ab);
  const auto g_v = nodal_gradient(mesh, out.psi_v);
  const auto g_r = nodal_gradient(mesh, out.psi_r);

  const std::size_t n = mesh.num_vertices();
  out.bundle.resize(n);
  out.k.resize(n);
  std::array<double, 4> alignment{};
  for (std::size_t v = 0; v < n; ++v) {
    Bundle b = Bundle::Apicobasal;
    if (out.psi_r[v] > config.tau_mv)
      b = Bundle::MitralValve;
    else if (out.psi_v[v] > config.tau_lpv)
      b = Bundle::LeftPulmonaryVeins;
    else if (out.psi_v[v] < config.tau_rpv)
      b = Bundle::RightPulmonaryVeins;
    out.bundle[v] = static_cast<int>(b);
    out.k[v] = b == Bundle::MitralValve ? g_r[v] : (b == Bundle::Apicobasal ? g_ab[v] : g_v[v]);
    alignment[static_cast<int>(b)] += dot(out.k[v], g_ab[v]);
  }
  // One sign per bundle, oriented along the apico-basal gradient on average.
  for (std::size_t v = 0; v < n; ++v)
    if (alignment[out.bundle[v]] < 0.0) out.k[v] = -out.k[v];
  return out;
}

LocalFrame local_frame(const Vec3& e_t, const Vec3& k, bool* normal_fallback) {
  const double k_norm = norm(k);
  Vec3 kn = k_norm > 0.0 ? k * (1.0 / k_norm) : k;
  kn = kn - dot(kn, e_t) * e_t;
  const bool degenerate = !(norm(kn) >= kNormalFloor);
  if (degenerate) {
    // Near-ties between axes go to the lower index so that roundoff in e_t
    // does not change the choice.
    int axis = 0;
    for (int a = 1; a < 3; ++a)
      if (std::abs(e_t[a]) < std::abs(e_t[axis]) - kAxisTie) axis = a;
    Vec3 unit;
    unit[axis] = 1.0;
    kn = unit - dot(unit, e_t) * e_t;
  }
  if (normal_fallback) *normal_fallback = degenerate;
  LocalFrame q;
  q.e_t = e_t;
  q.e_n = normalized(kn);
  q.e_l = cross(q.e_n, q.e_t);
  return q;
}

FrameField build_frame(const Mesh& mesh, const VectorField& grad_phi, const VectorField& k, FrameStats* stats) {
  const std::size_t n = mesh.num_vertices();
  FrameStats local_stats;
  FrameField frame;
  frame.e_l.resize(n);
  frame.e_n.resize(n);
  frame.e_t.resize(n);

  std::vector<char> valid(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const double g = norm(grad_phi[v]);
    if (g >= kGradientFloor) {
      frame.e_t[v] = grad_phi[v] * (1.0 / g);
      valid[v] = 1;
    }
  }
  if (std::find(valid.begin(), valid.end(), 0) != valid.end()) {
    const auto vc = vertex_cells(mesh);
    for (std::size_t v = 0; v < n; ++v) {
      if (valid[v]) continue;
      Vec3 avg;
      for (auto c : vc.of(v)) {
        const double vol = cell_volume(mesh, c);
        for (VertexId u : mesh.cell(c))
          if (u != v && valid[u]) avg += vol * frame.e_t[u];
      }
      if (norm(avg) >= kGradientFloor) {
        frame.e_t[v] = normalized(avg);
        ++local_stats.transmural_fallbacks;
      } else {
        frame.e_t[v] = {0, 0, 1};
        ++local_stats.transmural_axis_fallbacks;
      }
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    bool fallback = false;
    const auto q = local_frame(frame.e_t[v], k[v], &fallback);
    local_stats.normal_fallbacks += fallback;
    frame.e_l[v] = q.e_l;
    frame.e_n[v] = q.e_n;
    frame.e_t[v] = q.e_t;
  }
  if (stats) *stats = local_stats;
  return frame;
}

FiberTriad rotate_frame(const LocalFrame& q, double alpha_deg, double beta_deg) {
  const double alpha = alpha_deg * kDegree;
  const double beta = beta_deg * kDegree;
  const Vec3 f = rotate(q.e_l, q.e_t, alpha);
  const Vec3 n1 = rotate(q.e_n, q.e_t, alpha);
  return {f, rotate(n1, f, beta), rotate(q.e_t, f, beta)};
}

std::pair<double, double> angle_laws(double phi, const AngleSet& angles, std::optional<double> w_ot) {
  const double t = std::clamp(phi, 0.0, 1.0);
  EndpointAngles e = angles.wall;
  if (w_ot && angles.outflow) {
    const double w = std::clamp(*w_ot, 0.0, 1.0);
    const auto& o = *angles.outflow;
    e.alpha_endo = w * e.alpha_endo + (1.0 - w) * o.alpha_endo;
    e.alpha_epi = w * e.alpha_epi + (1.0 - w) * o.alpha_epi;
    e.beta_endo = w * e.beta_endo + (1.0 - w) * o.beta_endo;
    e.beta_epi = w * e.beta_epi + (1.0 - w) * o.beta_epi;
  }
  return {e.alpha_endo * (1.0 - t) + e.alpha_epi * t, e.beta_endo * (1.0 - t) + e.beta_epi * t};
}

const ScalarField* FiberResult::potential(const std::string& name) const {
  for (const auto& [key, field] : potentials)
    if (key == name) return &field;
  return nullptr;
}

const char* geometry_kind_name(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Slab: return "Slab";
    case GeometryKind::SphericalSlab: return "Spherical slab";
    case GeometryKind::LeftVentricleBased: return "Left ventricle";
    case GeometryKind::LeftVentricleComplete: return "Left ventricle complete";
    case GeometryKind::LeftAtrium: return "Left atrium";
  }
  return "?";
}

namespace {

void require_role(const std::vector<Label>& labels, const char* role) {
  if (labels.empty()) throw Error(Errc::LabelRoleMissing, std::string("no labels given for '") + role + "'");
}

void require_point(const std::optional<Vec3>& p, const char* role) {
  if (!p) throw Error(Errc::MissingApex, std::string("no coordinates given for '") + role + "'");
}

void validate(const GeometryConfig& c) {
  require_role(c.endo, "endo");
  require_role(c.epi, "epi");
  switch (c.kind) {
    case GeometryKind::Slab:
      require_role(c.base_up, "base up");
      require_role(c.base_down, "base down");
      break;
    case GeometryKind::SphericalSlab:
      require_point(c.north_pole, "north pole");
      require_point(c.south_pole, "south pole");
      break;
    case GeometryKind::LeftVentricleBased:
      if (c.algorithm == NormalAlgorithm::BT) {
        require_role(c.base, "base");
        require_point(c.apex, "apex");
      }
      break;
    case GeometryKind::LeftVentricleComplete:
      require_role(c.mv, "MV");
      require_role(c.av, "AV");
      require_point(c.apex, "apex");
      break;
    case GeometryKind::LeftAtrium:
      require_role(c.mv, "MV");
      require_role(c.lpv, "LPV");
      require_role(c.rpv, "RPV");
      for (double tau : {c.tau_mv, c.tau_lpv, c.tau_rpv})
        if (!(tau >= 0.0 && tau <= 1.0)) throw Error(Errc::PatternMismatch, "bundle thresholds must lie in [0, 1]");
      break;
  }
}

}  // namespace

FiberResult generate_fibers(const Mesh& mesh, const GeometryConfig& config) {
  validate(config);
  const HarmonicSolver h(mesh, config.solver);
  FiberResult r;
  r.phi = transmural_potential(h, config.endo, config.epi);
  const auto grad_phi = nodal_gradient(mesh, r.phi);

  VectorField k;
  const ScalarField* w_ot = nullptr;
  switch (config.kind) {
    case GeometryKind::Slab: {
      auto bt = bt_from_sets(h, require_vertices(mesh, config.base_up, "base up"),
                             require_vertices(mesh, config.base_down, "base down"));
      k = std::move(bt.k);
      r.potentials.emplace_back("psi", std::move(bt.psi));
      break;
    }
    case GeometryKind::SphericalSlab: {
      const VertexId north = nearest_vertex(mesh, *config.north_pole);
      const VertexId south = nearest_vertex(mesh, *config.south_pole);
      r.log.push_back(describe_snap("north pole", *config.north_pole, mesh, north));
      r.log.push_back(describe_snap("south pole", *config.south_pole, mesh, south));
      auto bt = bt_from_sets(h, {north}, {south});
      k = std::move(bt.k);
      r.potentials.emplace_back("psi", std::move(bt.psi));
      break;
    }
    case GeometryKind::LeftVentricleBased: {
      if (config.algorithm == NormalAlgorithm::RL) {
        k = normal_rl(mesh, config.normal_to_base);
      } else {
        auto bt = normal_bt(h, config.base, *config.apex);
        r.log.push_back(describe_snap("apex", *config.apex, mesh, bt.apex_vertex));
        k = std::move(bt.k);
        r.potentials.emplace_back("psi", std::move(bt.psi));
      }
      break;
    }
    case GeometryKind::LeftVentricleComplete: {
      auto d = normal_doste(h, config.mv, config.av, *config.apex);
      r.log.push_back(describe_snap("apex", *config.apex, mesh, d.apex_vertex));
      k = std::move(d.k);
      r.potentials.emplace_back("psi_ab", std::move(d.psi_ab));
      r.potentials.emplace_back("psi_ot", std::move(d.psi_ot));
      r.potentials.emplace_back("w", std::move(d.w));
      w_ot = &r.potentials.back().second;
      break;
    }
    case GeometryKind::LeftAtrium: {
      auto a = atrial_normals(h, config);
      if (config.appendage)
        r.log.push_back(describe_snap("appendage apex", *config.apex, mesh, a.apex_vertex));
      else
        r.log.push_back("atrial apex set to vertex " + std::to_string(a.apex_vertex) + " (farthest from the mitral ring)");
      k = std::move(a.k);
      r.bundle_id = std::move(a.bundle);
      r.potentials.emplace_back("psi_ab", std::move(a.psi_ab));
      r.potentials.emplace_back("psi_v", std::move(a.psi_v));
      r.potentials.emplace_back("psi_r", std::move(a.psi_r));
      break;
    }
  }

  r.frame = build_frame(mesh, grad_phi, k, &r.stats);
  const std::size_t n = mesh.num_vertices();
  r.f.resize(n);
  r.n.resize(n);
  r.s.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (config.kind == GeometryKind::LeftAtrium) {
      r.f[v] = r.frame.e_l[v];
      r.n[v] = r.frame.e_n[v];
      r.s[v] = r.frame.e_t[v];
      continue;
    }
    const LocalFrame q{r.frame.e_l[v], r.frame.e_n[v], r.frame.e_t[v]};
    const auto [alpha, beta] =
        angle_laws(r.phi[v], config.angles, w_ot ? std::optional<double>((*w_ot)[v]) : std::nullopt);
    auto t = rotate_frame(q, alpha, beta);
    if (config.kind == GeometryKind::SphericalSlab && config.radial_fibers) {
      // f and s exchange roles; n flips to keep the triad right-handed.
      std::swap(t.f, t.s);
      t.n = -t.n;
    }
    r.f[v] = t.f;
    r.n[v] = t.n;
    r.s[v] = t.s;
  }
  if (r.stats.transmural_fallbacks + r.stats.transmural_axis_fallbacks + r.stats.normal_fallbacks > 0) {
    r.log.push_back("frame fallbacks: " + std::to_string(r.stats.transmural_fallbacks) + " transmural (neighbor), " +
                    std::to_string(r.stats.transmural_axis_fallbacks) + " transmural (axis), " +
                    std::to_string(r.stats.normal_fallbacks) + " normal");
  }
  return r;
}

}  // namespace fibergen
