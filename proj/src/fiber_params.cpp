#include "fibergen/fiber_params.hpp"

#include <limits>

#include "fibergen/error.hpp"

namespace fibergen {

using params::Pattern;
using params::Verbosity;

namespace {

const std::string kMesh = std::string(kParamRoot) + "/Mesh and space discretization/";
const std::string kOutput = std::string(kParamRoot) + "/Output/";
const std::string kSolver = std::string(kParamRoot) + "/Linear solver/";
const std::string kSlab = std::string(kParamRoot) + "/Slab/";
const std::string kLv = std::string(kParamRoot) + "/Left ventricle/";
const std::string kLvc = std::string(kParamRoot) + "/Left ventricle complete/";
const std::string kLa = std::string(kParamRoot) + "/Left atrium/";

Pattern tag_list() { return Pattern::list(Pattern::integer(0)); }
Pattern point() { return Pattern::list(Pattern::real(), 3, 3, " "); }

void declare_angles(params::ParamTree& t, const std::string& at, const char* suffix, double a_epi, double a_endo,
                    double b_epi, double b_endo) {
  const auto num = [](double x) {
    auto s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    return s;
  };
  const std::string sfx = suffix;
  const std::string where = sfx.empty() ? "" : " in the outflow tract";
  t.declare(at + "alpha epi" + sfx, num(a_epi), Pattern::real(), "Helical angle on the epicardium" + where + " [deg].",
            Verbosity::Full);
  t.declare(at + "alpha endo" + sfx, num(a_endo), Pattern::real(), "Helical angle on the endocardium" + where + " [deg].",
            Verbosity::Full);
  t.declare(at + "beta epi" + sfx, num(b_epi), Pattern::real(), "Sheetlet angle on the epicardium" + where + " [deg].",
            Verbosity::Full);
  t.declare(at + "beta endo" + sfx, num(b_endo), Pattern::real(), "Sheetlet angle on the endocardium" + where + " [deg].",
            Verbosity::Full);
}

std::vector<Label> read_tags(const params::ParamTree& t, const std::string& path) {
  std::vector<Label> out;
  for (const auto& s : t.get_list(path)) out.push_back(std::stoi(s));
  return out;
}

Vec3 read_point(const params::ParamTree& t, const std::string& path) {
  const auto parts = t.get_list(path);
  return {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
}

EndpointAngles read_angles(const params::ParamTree& t, const std::string& at, const char* suffix = "") {
  const std::string sfx = suffix;
  return {t.get_double(at + "alpha endo" + sfx), t.get_double(at + "alpha epi" + sfx),
          t.get_double(at + "beta endo" + sfx), t.get_double(at + "beta epi" + sfx)};
}

}  // namespace

params::ParamTree fiber_parameters() {
  params::ParamTree t;
  // The first six declarations fix the pattern indices of the standard file.
  t.declare(kMesh + "File/Filename", "", Pattern::input_file(), "Mesh file.", Verbosity::Minimal);
  t.declare(kMesh + "File/Scaling factor", "1e-3", Pattern::real(0.0, std::numeric_limits<double>::max()),
            "Mesh scaling factor: 1e-3 => from [mm] to [m].");
  t.declare(kMesh + "Element type", "Hex", Pattern::selection({"Hex", "Tet"}),
            "Specify whether the input mesh has hexahedral or tetrahedral elements. Available options are: Hex | Tet.",
            Verbosity::Minimal);
  t.declare(kMesh + "Number of refinements", "0", Pattern::integer(0),
            "Number of global mesh refinement steps applied to the initial grid (Hex only).");
  t.declare(kOutput + "Enable output", "true", Pattern::boolean(), "Enable/disable output.");
  t.declare(kOutput + "Filename", "fibers", Pattern::output_file(), "Output file.", Verbosity::Minimal);

  t.declare(kMesh + "FE space degree", "1", Pattern::integer(1), "Degree of the finite element space.", Verbosity::Full);
  t.declare(kMesh + "Geometry type", "Slab",
            Pattern::selection({"Slab", "Left ventricle", "Left ventricle complete", "Left atrium"}),
            "Kind of input geometry. Available options are: Slab | Left ventricle | Left ventricle complete | "
            "Left atrium.",
            Verbosity::Full);

  t.declare(kSlab + "Sphere slab", "false", Pattern::boolean(), "Treat the slab as a spherical shell.",
            Verbosity::Full);
  t.declare(kSlab + "Sphere with radial fibers", "false", Pattern::boolean(),
            "Exchange fiber and sheet directions on the spherical slab.", Verbosity::Full);
  t.declare(kSlab + "North pole", "0 0 0.025", point(), "Coordinates of the north pole of the spherical slab.",
            Verbosity::Full);
  t.declare(kSlab + "South pole", "0 0 -0.025", point(), "Coordinates of the south pole of the spherical slab.",
            Verbosity::Full);
  t.declare(kSlab + "Tags base up", "50", tag_list(), "Labels of the upper base.", Verbosity::Full);
  t.declare(kSlab + "Tags base down", "60", tag_list(), "Labels of the lower base.", Verbosity::Full);
  t.declare(kSlab + "Tags epi", "10", tag_list(), "Labels of the epicardium.", Verbosity::Full);
  t.declare(kSlab + "Tags endo", "20", tag_list(), "Labels of the endocardium.", Verbosity::Full);
  declare_angles(t, kSlab, "", -60, 60, 45, -45);

  t.declare(kLv + "Tags base", "50", tag_list(), "Labels of the base.", Verbosity::Full);
  t.declare(kLv + "Tags epi", "10", tag_list(), "Labels of the epicardium.", Verbosity::Full);
  t.declare(kLv + "Tags endo", "20", tag_list(), "Labels of the endocardium.", Verbosity::Full);
  t.declare(kLv + "Algorithm type", "BT", Pattern::selection({"RL", "BT"}),
            "Normal direction: constant (RL) or from an apico-basal potential (BT).", Verbosity::Full);
  declare_angles(t, kLv, "", -60, 60, 20, -20);
  t.declare(kLv + "RL/Normal to base", "0 0 1", point(), "Direction normal to the base.", Verbosity::Full);
  t.declare(kLv + "BT/Apex", "0 0 0.0601846", point(), "Coordinates of the apex.", Verbosity::Full);

  t.declare(kLvc + "Tags MV", "50", tag_list(), "Labels of the mitral valve ring.", Verbosity::Full);
  t.declare(kLvc + "Tags AV", "60", tag_list(), "Labels of the aortic valve ring.", Verbosity::Full);
  t.declare(kLvc + "Tags epi", "10", tag_list(), "Labels of the epicardium.", Verbosity::Full);
  t.declare(kLvc + "Tags endo", "20", tag_list(), "Labels of the endocardium.", Verbosity::Full);
  t.declare(kLvc + "Apex", "0.0692 0.0710 0.3522", point(), "Coordinates of the apex.", Verbosity::Full);
  declare_angles(t, kLvc, "", -60, 60, 20, -20);
  declare_angles(t, kLvc, " OT", 0, 90, 0, 0);

  t.declare(kLa + "Appendage", "false", Pattern::boolean(), "Place the apico-basal minimum at the appendage apex.",
            Verbosity::Full);
  t.declare(kLa + "Apex", "83.868 16.369 45.989", point(), "Coordinates of the appendage apex.", Verbosity::Full);
  t.declare(kLa + "Tags epi", "30", tag_list(), "Labels of the epicardium.", Verbosity::Full);
  t.declare(kLa + "Tags endo", "10", tag_list(), "Labels of the endocardium.", Verbosity::Full);
  t.declare(kLa + "Tags RPV", "20", tag_list(), "Labels of the right pulmonary veins.", Verbosity::Full);
  t.declare(kLa + "Tags LPV", "50", tag_list(), "Labels of the left pulmonary veins.", Verbosity::Full);
  t.declare(kLa + "Tags MV", "40", tag_list(), "Labels of the mitral valve ring.", Verbosity::Full);
  const auto unit = Pattern::real(0.0, 1.0);
  t.declare(kLa + "Tau bundle MV", "0.65", unit, "Threshold of the mitral valve bundle.", Verbosity::Full);
  t.declare(kLa + "Tau bundle LPV", "0.85", unit, "Threshold of the left pulmonary veins bundle.", Verbosity::Full);
  t.declare(kLa + "Tau bundle RPV", "0.15", unit, "Threshold of the right pulmonary veins bundle.", Verbosity::Full);

  t.declare(kSolver + "Tolerance", "1e-12", Pattern::real(0.0, std::numeric_limits<double>::max()),
            "Relative residual tolerance.", Verbosity::Full);
  t.declare(kSolver + "Absolute tolerance", "1e-14", Pattern::real(0.0, std::numeric_limits<double>::max()),
            "Absolute residual tolerance.", Verbosity::Full);
  t.declare(kSolver + "Max iterations", "0", Pattern::integer(0),
            "Iteration limit; 0 means ten times the number of unknowns.", Verbosity::Full);
  t.declare(kSolver + "Preconditioner", "Jacobi", Pattern::selection({"Jacobi", "None"}), "Preconditioner.",
            Verbosity::Full);
  return t;
}

RunSettings read_settings(const params::ParamTree& t) {
  RunSettings s;
  s.element = t.get(kMesh + "Element type") == "Tet" ? ElementKind::Tet4 : ElementKind::Hex8;
  s.degree = static_cast<int>(t.get_integer(kMesh + "FE space degree"));
  if (s.degree != 1)
    throw Error(Errc::UnsupportedDegree, kMesh + "FE space degree = " + std::to_string(s.degree) +
                                             ": only degree 1 is implemented");
  s.refinements = static_cast<int>(t.get_integer(kMesh + "Number of refinements"));
  s.mesh_file = t.get(kMesh + "File/Filename");
  s.scaling = t.get_double(kMesh + "File/Scaling factor");
  if (!(s.scaling > 0.0))
    throw Error(Errc::NonPositiveFactor, kMesh + "File/Scaling factor must be positive");
  s.output_enabled = t.get_bool(kOutput + "Enable output");
  s.output_name = t.get(kOutput + "Filename");

  GeometryConfig& g = s.geometry;
  g.solver.relative_tolerance = t.get_double(kSolver + "Tolerance");
  g.solver.absolute_tolerance = t.get_double(kSolver + "Absolute tolerance");
  if (const auto it = t.get_integer(kSolver + "Max iterations"); it > 0) g.solver.max_iterations = it;
  g.solver.preconditioner = t.get(kSolver + "Preconditioner") == "None" ? Preconditioner::None : Preconditioner::Jacobi;

  const std::string& type = t.get(kMesh + "Geometry type");
  if (type == "Slab") {
    g.kind = t.get_bool(kSlab + "Sphere slab") ? GeometryKind::SphericalSlab : GeometryKind::Slab;
    g.radial_fibers = t.get_bool(kSlab + "Sphere with radial fibers");
    g.north_pole = read_point(t, kSlab + "North pole");
    g.south_pole = read_point(t, kSlab + "South pole");
    g.base_up = read_tags(t, kSlab + "Tags base up");
    g.base_down = read_tags(t, kSlab + "Tags base down");
    g.epi = read_tags(t, kSlab + "Tags epi");
    g.endo = read_tags(t, kSlab + "Tags endo");
    g.angles.wall = read_angles(t, kSlab);
  } else if (type == "Left ventricle") {
    g.kind = GeometryKind::LeftVentricleBased;
    g.base = read_tags(t, kLv + "Tags base");
    g.epi = read_tags(t, kLv + "Tags epi");
    g.endo = read_tags(t, kLv + "Tags endo");
    g.algorithm = t.get(kLv + "Algorithm type") == "RL" ? NormalAlgorithm::RL : NormalAlgorithm::BT;
    g.angles.wall = read_angles(t, kLv);
    g.normal_to_base = read_point(t, kLv + "RL/Normal to base");
    g.apex = read_point(t, kLv + "BT/Apex");
  } else if (type == "Left ventricle complete") {
    g.kind = GeometryKind::LeftVentricleComplete;
    g.mv = read_tags(t, kLvc + "Tags MV");
    g.av = read_tags(t, kLvc + "Tags AV");
    g.epi = read_tags(t, kLvc + "Tags epi");
    g.endo = read_tags(t, kLvc + "Tags endo");
    g.apex = read_point(t, kLvc + "Apex");
    g.angles.wall = read_angles(t, kLvc);
    g.angles.outflow = read_angles(t, kLvc, " OT");
  } else {
    g.kind = GeometryKind::LeftAtrium;
    g.appendage = t.get_bool(kLa + "Appendage");
    g.apex = read_point(t, kLa + "Apex");
    g.epi = read_tags(t, kLa + "Tags epi");
    g.endo = read_tags(t, kLa + "Tags endo");
    g.rpv = read_tags(t, kLa + "Tags RPV");
    g.lpv = read_tags(t, kLa + "Tags LPV");
    g.mv = read_tags(t, kLa + "Tags MV");
    g.tau_mv = t.get_double(kLa + "Tau bundle MV");
    g.tau_lpv = t.get_double(kLa + "Tau bundle LPV");
    g.tau_rpv = t.get_double(kLa + "Tau bundle RPV");
  }
  return s;
}

}  // namespace fibergen
