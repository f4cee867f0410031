#pragma once

#include <string>

#include "fibergen/ldrbm.hpp"
#include "fibergen/mesh.hpp"
#include "fibergen/params.hpp"

namespace fibergen {

/// Root subsection of every fiber-generation parameter file.
inline constexpr const char* kParamRoot = "Fiber generation";

/// Declarations of the fiber-generation executable, all at their defaults.
params::ParamTree fiber_parameters();

struct RunSettings {
  ElementKind element = ElementKind::Hex8;
  int degree = 1;
  int refinements = 0;
  std::string mesh_file;
  double scaling = 1e-3;
  bool output_enabled = true;
  std::string output_name = "fibers";
  GeometryConfig geometry;
};

/// Typed view of a parsed tree; only the subsection named by Geometry type
/// is read.
RunSettings read_settings(const params::ParamTree& tree);

}  // namespace fibergen
