#include "fibergen/gmsh.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "fibergen/error.hpp"

namespace fibergen {

namespace {

constexpr int kLine = 1, kTri = 2, kQuad = 3, kTet = 4, kHex = 5, kLine3 = 8, kPoint = 15;

int nodes_of_type(int type) {
  switch (type) {
    case kLine: return 2;
    case kTri: return 3;
    case kQuad: return 4;
    case kTet: return 4;
    case kHex: return 8;
    case kLine3: return 3;
    case kPoint: return 1;
    default: return -1;
  }
}

class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string_view next() {
    skip_space();
    if (pos_ >= text_.size()) throw Error(Errc::MalformedMesh, "unexpected end of MSH data");
    const auto start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  template <typename T>
  T number() {
    const auto tok = next();
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw Error(Errc::MalformedMesh, "malformed number '" + std::string(tok) + "' in MSH data");
    return value;
  }

  void expect(std::string_view tag) {
    const auto tok = next();
    if (tok != tag) throw Error(Errc::MalformedMesh, "expected " + std::string(tag) + ", found " + std::string(tok));
  }

  void skip_section(std::string_view header) {
    const std::string end = "$End" + std::string(header.substr(1));
    while (next() != end) {
    }
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct RawElement {
  int type;
  Label label;
  std::vector<std::size_t> node_tags;
};

struct RawMesh {
  std::vector<Vec3> vertices;
  std::unordered_map<std::size_t, VertexId> index_of_tag;
  std::vector<RawElement> elements;
};

void add_node(RawMesh& raw, std::size_t tag, const Vec3& p) {
  raw.index_of_tag[tag] = static_cast<VertexId>(raw.vertices.size());
  raw.vertices.push_back(p);
}

void check_type(int type) {
  if (nodes_of_type(type) < 0)
    throw Error(Errc::UnsupportedElementType, "unsupported MSH element type " + std::to_string(type) +
                                                  " (only tet4, hex8, tri3, quad4, lines and points are accepted)");
}

void read_nodes_v2(Tokens& t, RawMesh& raw) {
  const auto n = t.number<std::size_t>();
  for (std::size_t i = 0; i < n; ++i) {
    const auto tag = t.number<std::size_t>();
    Vec3 p;
    p.x = t.number<double>();
    p.y = t.number<double>();
    p.z = t.number<double>();
    add_node(raw, tag, p);
  }
  t.expect("$EndNodes");
}

void read_elements_v2(Tokens& t, RawMesh& raw) {
  const auto n = t.number<std::size_t>();
  for (std::size_t i = 0; i < n; ++i) {
    t.number<std::size_t>();
    const int type = t.number<int>();
    check_type(type);
    const int ntags = t.number<int>();
    Label physical = 0;
    for (int k = 0; k < ntags; ++k) {
      const int tag = t.number<int>();
      if (k == 0) physical = tag;
    }
    RawElement e{type, physical, {}};
    for (int k = 0; k < nodes_of_type(type); ++k) e.node_tags.push_back(t.number<std::size_t>());
    raw.elements.push_back(std::move(e));
  }
  t.expect("$EndElements");
}

/// Physical tag of each (dimension, entity tag) pair from $Entities.
using EntityPhysicals = std::map<std::pair<int, int>, Label>;

EntityPhysicals read_entities_v4(Tokens& t) {
  EntityPhysicals physicals;
  std::array<std::size_t, 4> counts{};
  for (auto& c : counts) c = t.number<std::size_t>();
  for (int dim = 0; dim < 4; ++dim) {
    for (std::size_t i = 0; i < counts[dim]; ++i) {
      const int tag = t.number<int>();
      for (int k = 0; k < (dim == 0 ? 3 : 6); ++k) t.number<double>();
      const auto nphys = t.number<std::size_t>();
      for (std::size_t k = 0; k < nphys; ++k) {
        const int phys = t.number<int>();
        if (k == 0) physicals[{dim, tag}] = phys;
      }
      if (dim > 0) {
        const auto nbound = t.number<std::size_t>();
        for (std::size_t k = 0; k < nbound; ++k) t.number<int>();
      }
    }
  }
  t.expect("$EndEntities");
  return physicals;
}

void read_nodes_v4(Tokens& t, RawMesh& raw) {
  const auto nblocks = t.number<std::size_t>();
  t.number<std::size_t>();
  t.number<std::size_t>();
  t.number<std::size_t>();
  std::vector<std::size_t> tags;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const int dim = t.number<int>();
    t.number<int>();
    const int parametric = t.number<int>();
    const auto n = t.number<std::size_t>();
    tags.resize(n);
    for (auto& tag : tags) tag = t.number<std::size_t>();
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 p;
      p.x = t.number<double>();
      p.y = t.number<double>();
      p.z = t.number<double>();
      if (parametric != 0)
        for (int k = 0; k < dim && k < 3; ++k) t.number<double>();
      add_node(raw, tags[i], p);
    }
  }
  t.expect("$EndNodes");
}

void read_elements_v4(Tokens& t, RawMesh& raw, const EntityPhysicals& physicals) {
  const auto nblocks = t.number<std::size_t>();
  t.number<std::size_t>();
  t.number<std::size_t>();
  t.number<std::size_t>();
  for (std::size_t b = 0; b < nblocks; ++b) {
    const int dim = t.number<int>();
    const int entity = t.number<int>();
    const int type = t.number<int>();
    check_type(type);
    const auto n = t.number<std::size_t>();
    const auto it = physicals.find({dim, entity});
    const Label label = it == physicals.end() ? 0 : it->second;
    for (std::size_t i = 0; i < n; ++i) {
      t.number<std::size_t>();
      RawElement e{type, label, {}};
      for (int k = 0; k < nodes_of_type(type); ++k) e.node_tags.push_back(t.number<std::size_t>());
      raw.elements.push_back(std::move(e));
    }
  }
  t.expect("$EndElements");
}

Mesh assemble(RawMesh raw) {
  int volume_type = 0;
  for (const auto& e : raw.elements) {
    if (e.type != kTet && e.type != kHex) continue;
    if (volume_type != 0 && volume_type != e.type)
      throw Error(Errc::MixedElementKinds, "mesh mixes tetrahedra and hexahedra");
    volume_type = e.type;
  }
  if (volume_type == 0) throw Error(Errc::EmptyMesh, "MSH data contains no tet4 or hex8 volume elements");
  const int face_type = volume_type == kTet ? kTri : kQuad;

  std::vector<VertexId> cells, faces;
  std::vector<Label> labels;
  const auto resolve = [&](std::size_t tag) {
    const auto it = raw.index_of_tag.find(tag);
    if (it == raw.index_of_tag.end()) throw Error(Errc::DanglingIndex, "element references unknown node " + std::to_string(tag));
    return it->second;
  };
  for (const auto& e : raw.elements) {
    if (e.type == volume_type) {
      for (auto tag : e.node_tags) cells.push_back(resolve(tag));
    } else if (e.type == face_type) {
      for (auto tag : e.node_tags) faces.push_back(resolve(tag));
      labels.push_back(e.label);
    } else if (e.type == kTri || e.type == kQuad) {
      throw Error(Errc::MixedElementKinds, volume_type == kTet ? "quadrilateral face in a tetrahedral mesh"
                                                               : "triangular face in a hexahedral mesh");
    }
  }
  return Mesh(volume_type == kTet ? ElementKind::Tet4 : ElementKind::Hex8, std::move(raw.vertices), std::move(cells),
              std::move(faces), std::move(labels));
}

}  // namespace

Mesh parse_gmsh(std::string_view text) {
  Tokens t(text);
  if (t.done()) throw Error(Errc::MalformedMesh, "empty MSH data");
  t.expect("$MeshFormat");
  const std::string version(t.next());
  const int file_type = t.number<int>();
  t.number<int>();
  if (file_type != 0) throw Error(Errc::BinaryFormatUnsupported, "binary MSH files are not supported; save as ASCII");
  if (version != "4.1" && version != "2.2")
    throw Error(Errc::UnsupportedVersion, "unsupported MSH version " + version + " (expected 4.1 or 2.2)");
  const bool v4 = version == "4.1";
  t.expect("$EndMeshFormat");

  RawMesh raw;
  EntityPhysicals physicals;
  bool have_nodes = false;
  while (!t.done()) {
    const auto header = t.next();
    if (header == "$Nodes") {
      v4 ? read_nodes_v4(t, raw) : read_nodes_v2(t, raw);
      have_nodes = true;
    } else if (header == "$Elements") {
      if (!have_nodes) throw Error(Errc::MalformedMesh, "$Elements section precedes $Nodes");
      v4 ? read_elements_v4(t, raw, physicals) : read_elements_v2(t, raw);
    } else if (header == "$Entities" && v4) {
      physicals = read_entities_v4(t);
    } else if (!header.empty() && header[0] == '$') {
      t.skip_section(header);
    } else {
      throw Error(Errc::MalformedMesh, "unexpected token '" + std::string(header) + "' between MSH sections");
    }
  }
  return assemble(std::move(raw));
}

Mesh read_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open mesh file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_gmsh(buffer.str());
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_gmsh(const Mesh& mesh, std::ostream& out, GmshVersion version) {
  const int cell_type = mesh.kind() == ElementKind::Tet4 ? kTet : kHex;
  const int face_type = mesh.kind() == ElementKind::Tet4 ? kTri : kQuad;
  const std::size_t nv = mesh.num_vertices();

  if (version == GmshVersion::V22) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << nv << '\n';
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& p = mesh.vertex(v);
      out << v + 1 << ' ' << fmt_double(p.x) << ' ' << fmt_double(p.y) << ' ' << fmt_double(p.z) << '\n';
    }
    out << "$EndNodes\n$Elements\n" << mesh.num_faces() + mesh.num_cells() << '\n';
    std::size_t id = 1;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
      out << id++ << ' ' << face_type << " 2 " << mesh.face_label(f) << ' ' << mesh.face_label(f);
      for (VertexId v : mesh.face(f)) out << ' ' << v + 1;
      out << '\n';
    }
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      out << id++ << ' ' << cell_type << " 2 0 1";
      for (VertexId v : mesh.cell(c)) out << ' ' << v + 1;
      out << '\n';
    }
    out << "$EndElements\n";
    return;
  }

  // One surface entity per distinct label, in order of first appearance.
  std::vector<Label> entity_labels;
  std::map<Label, int> entity_of;
  for (Label l : mesh.face_labels())
    if (entity_of.try_emplace(l, static_cast<int>(entity_labels.size()) + 1).second) entity_labels.push_back(l);

  out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n$Entities\n0 0 " << entity_labels.size() << " 1\n";
  for (std::size_t i = 0; i < entity_labels.size(); ++i) {
    out << i + 1 << " 0 0 0 0 0 0 ";
    if (entity_labels[i] == 0)
      out << "0 0\n";
    else
      out << "1 " << entity_labels[i] << " 0\n";
  }
  out << "1 0 0 0 0 0 0 0 " << entity_labels.size();
  for (std::size_t i = 0; i < entity_labels.size(); ++i) out << ' ' << i + 1;
  out << "\n$EndEntities\n";

  out << "$Nodes\n1 " << nv << " 1 " << nv << "\n3 1 0 " << nv << '\n';
  for (std::size_t v = 0; v < nv; ++v) out << v + 1 << '\n';
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& p = mesh.vertex(v);
    out << fmt_double(p.x) << ' ' << fmt_double(p.y) << ' ' << fmt_double(p.z) << '\n';
  }
  out << "$EndNodes\n";

  const std::size_t total = mesh.num_faces() + mesh.num_cells();
  out << "$Elements\n" << entity_labels.size() + 1 << ' ' << total << " 1 " << total << '\n';
  std::size_t id = 1;
  for (std::size_t i = 0; i < entity_labels.size(); ++i) {
    std::size_t count = 0;
    for (Label l : mesh.face_labels()) count += l == entity_labels[i];
    out << "2 " << i + 1 << ' ' << face_type << ' ' << count << '\n';
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
      if (mesh.face_label(f) != entity_labels[i]) continue;
      out << id++;
      for (VertexId v : mesh.face(f)) out << ' ' << v + 1;
      out << '\n';
    }
  }
  out << "3 1 " << cell_type << ' ' << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    out << id++;
    for (VertexId v : mesh.cell(c)) out << ' ' << v + 1;
    out << '\n';
  }
  out << "$EndElements\n";
}

void write_gmsh(const Mesh& mesh, const std::filesystem::path& path, GmshVersion version) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write mesh file '" + path.string() + "'");
  write_gmsh(mesh, out, version);
  if (!out) throw Error(Errc::IoError, "failed while writing '" + path.string() + "'");
}

}  // namespace fibergen
