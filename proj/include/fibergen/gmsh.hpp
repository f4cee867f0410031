#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "fibergen/mesh.hpp"

namespace fibergen {

/// Reads a Gmsh MSH ASCII mesh (version 4.1 or 2.2). Surface elements carry
/// their physical tag as label (0 when untagged); volume physical tags are
/// ignored. Points and line elements are skipped.
Mesh parse_gmsh(std::string_view text);
Mesh read_gmsh(const std::filesystem::path& path);

enum class GmshVersion { V22, V41 };

void write_gmsh(const Mesh& mesh, std::ostream& out, GmshVersion version = GmshVersion::V41);
void write_gmsh(const Mesh& mesh, const std::filesystem::path& path, GmshVersion version = GmshVersion::V41);

}  // namespace fibergen
