#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fibergen/fem.hpp"
#include "fibergen/mesh.hpp"

namespace fibergen {

/// Endpoint angles (degrees) of the transmural laws.
struct EndpointAngles {
  double alpha_endo = 0.0;
  double alpha_epi = 0.0;
  double beta_endo = 0.0;
  double beta_epi = 0.0;
};

struct AngleSet {
  EndpointAngles wall;
  /// Outflow-tract endpoints, blended in by the interpolation field w.
  std::optional<EndpointAngles> outflow;
};

enum class GeometryKind { Slab, SphericalSlab, LeftVentricleBased, LeftVentricleComplete, LeftAtrium };
enum class NormalAlgorithm { RL, BT };

enum class Bundle : int { Apicobasal = 0, MitralValve = 1, LeftPulmonaryVeins = 2, RightPulmonaryVeins = 3 };

struct GeometryConfig {
  GeometryKind kind = GeometryKind::Slab;

  std::vector<Label> endo, epi;
  std::vector<Label> base_up, base_down;  // slab
  std::vector<Label> base;                // based ventricle
  std::vector<Label> mv, av;              // complete ventricle, atrium (mv)
  std::vector<Label> lpv, rpv;            // atrium

  std::optional<Vec3> apex;
  std::optional<Vec3> north_pole, south_pole;

  NormalAlgorithm algorithm = NormalAlgorithm::BT;
  Vec3 normal_to_base{0, 0, 1};
  bool radial_fibers = false;
  bool appendage = false;
  double tau_mv = 0.65, tau_lpv = 0.85, tau_rpv = 0.15;

  AngleSet angles;
  SolverOptions solver;
};

/// Stiffness matrix and solver settings shared by all harmonic problems on
/// one mesh.
class HarmonicSolver {
 public:
  explicit HarmonicSolver(const Mesh& mesh, SolverOptions options = {});

  const Mesh& mesh() const noexcept { return mesh_; }
  ScalarField solve(const LaplaceProblemSpec& spec) const;

 private:
  const Mesh& mesh_;
  LaplaceSolver solver_;
  SolverOptions options_;
};

/// phi = 1 on the epicardium, 0 on the endocardium.
ScalarField transmural_potential(const HarmonicSolver& h, std::span<const Label> endo, std::span<const Label> epi);

/// Constant normal field k = n_base.
VectorField normal_rl(const Mesh& mesh, const Vec3& n_base);

struct BtNormal {
  VectorField k;
  ScalarField psi;
  VertexId apex_vertex = 0;
};

/// psi = 1 on the base, 0 at the vertex nearest to apex; k = grad psi.
BtNormal normal_bt(const HarmonicSolver& h, std::span<const Label> base, const Vec3& apex);

struct DosteNormal {
  VectorField k;
  ScalarField w, psi_ab, psi_ot;
  VertexId apex_vertex = 0;
};

/// k = w grad psi_ab + (1 - w) grad psi_ot.
DosteNormal normal_doste(const HarmonicSolver& h, std::span<const Label> mv, std::span<const Label> av, const Vec3& apex);

struct AtrialNormal {
  VectorField k;
  std::vector<int> bundle;
  ScalarField psi_ab, psi_v, psi_r;
  VertexId apex_vertex = 0;
};

/// Bundle-wise selection of the normal direction among grad psi_ab,
/// grad psi_v and grad psi_r.
AtrialNormal atrial_normals(const HarmonicSolver& h, const GeometryConfig& config);

struct LocalFrame {
  Vec3 e_l, e_n, e_t;
};

struct FrameField {
  VectorField e_l, e_n, e_t;
};

struct FrameStats {
  std::size_t transmural_fallbacks = 0;         // e_t from neighbors
  std::size_t transmural_axis_fallbacks = 0;    // e_t set to +z
  std::size_t normal_fallbacks = 0;             // k parallel to e_t
};

/// Orthonormal frame at one point from a unit transmural direction and k.
/// Sets normal_fallback when k/|k| has less than 1e-10 left after removing
/// its e_t component.
LocalFrame local_frame(const Vec3& e_t, const Vec3& k, bool* normal_fallback = nullptr);

/// Per-vertex frames [e_l, e_n, e_t] with the degenerate-gradient fallbacks.
FrameField build_frame(const Mesh& mesh, const VectorField& grad_phi, const VectorField& k, FrameStats* stats = nullptr);

struct FiberTriad {
  Vec3 f, n, s;
};

/// Rotates e_l about e_t by alpha, then e_t about the rotated longitudinal
/// direction by beta (both counter-clockwise, degrees).
FiberTriad rotate_frame(const LocalFrame& q, double alpha_deg, double beta_deg);

/// Helical and sheetlet angle at transmural position phi. With w_ot the
/// endpoint angles are first blended towards the outflow-tract endpoints.
std::pair<double, double> angle_laws(double phi, const AngleSet& angles, std::optional<double> w_ot = std::nullopt);

struct FiberResult {
  VectorField f, n, s;
  ScalarField phi;
  /// Auxiliary potentials in solve order, e.g. {"psi", ...}.
  std::vector<std::pair<std::string, ScalarField>> potentials;
  std::vector<int> bundle_id;  // atrium only
  FrameField frame;            // unrotated axes
  FrameStats stats;
  std::vector<std::string> log;

  const ScalarField* potential(const std::string& name) const;
};

FiberResult generate_fibers(const Mesh& mesh, const GeometryConfig& config);

const char* geometry_kind_name(GeometryKind kind);

}  // namespace fibergen
