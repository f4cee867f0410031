#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fibergen/ldrbm.hpp"
#include "fibergen/mesh.hpp"

namespace fibergen {

struct OutputSpec {
  bool enabled = true;
  /// ".vtu" is appended unless already present.
  std::filesystem::path filename = "fibers";
  /// Subset of f, s, n, phi, bundle_id and the auxiliary potential names;
  /// empty selects everything the result holds.
  std::vector<std::string> fields;
};

/// Writes an ASCII VTK unstructured grid and returns the path written.
std::filesystem::path write_vtu(const Mesh& mesh, const FiberResult& result, const OutputSpec& spec);
void write_vtu(std::ostream& out, const Mesh& mesh, const FiberResult& result,
               const std::vector<std::string>& fields = {});

/// Contents of a .vtu file as written by write_vtu.
struct VtuData {
  struct Array {
    int components = 1;
    std::vector<double> values;
  };

  ElementKind kind = ElementKind::Tet4;
  std::vector<Vec3> points;
  std::vector<VertexId> connectivity;
  std::map<std::string, Array> point_data;

  Mesh mesh() const;
  VectorField vectors(const std::string& name) const;
};

VtuData read_vtu(const std::filesystem::path& path);
VtuData parse_vtu(const std::string& text);

}  // namespace fibergen
