#include "fibergen/output.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fibergen/error.hpp"

namespace fibergen {

namespace {

void put(std::ostream& out, double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  out.write(buf, n);
}

void vector_array(std::ostream& out, const char* name, const VectorField& v) {
  out << "        <DataArray type=\"Float64\" Name=\"" << name << "\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const auto& x : v) {
    out << "          ";
    put(out, x.x);
    out << ' ';
    put(out, x.y);
    out << ' ';
    put(out, x.z);
    out << '\n';
  }
  out << "        </DataArray>\n";
}

void scalar_array(std::ostream& out, const std::string& name, const ScalarField& v) {
  out << "        <DataArray type=\"Float64\" Name=\"" << name << "\" format=\"ascii\">\n";
  for (double x : v) {
    out << "          ";
    put(out, x);
    out << '\n';
  }
  out << "        </DataArray>\n";
}

// Attribute value of name="..." inside a tag.
std::string attribute(std::string_view tag, std::string_view name) {
  const std::string key = " " + std::string(name) + "=\"";
  const auto at = tag.find(key);
  if (at == std::string_view::npos) return {};
  const auto start = at + key.size();
  return std::string(tag.substr(start, tag.find('"', start) - start));
}

}  // namespace

void write_vtu(std::ostream& out, const Mesh& mesh, const FiberResult& r, const std::vector<std::string>& fields) {
  const auto wanted = [&](const std::string& name) {
    return fields.empty() || std::find(fields.begin(), fields.end(), name) != fields.end();
  };
  const std::size_t n = mesh.num_vertices();
  const auto check = [n](std::size_t size, const char* name) {
    if (size != n)
      throw Error(Errc::LengthMismatch, std::string("field '") + name + "' has " + std::to_string(size) +
                                            " values for " + std::to_string(n) + " vertices");
  };

  out << "<?xml version=\"1.0\"?>\n"
      << "<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n"
      << "  <UnstructuredGrid>\n"
      << "    <Piece NumberOfPoints=\"" << n << "\" NumberOfCells=\"" << mesh.num_cells() << "\">\n"
      << "      <PointData Vectors=\"fiber_f\" Scalars=\"phi\">\n";
  if (wanted("f")) check(r.f.size(), "f"), vector_array(out, "fiber_f", r.f);
  if (wanted("s")) check(r.s.size(), "s"), vector_array(out, "sheet_s", r.s);
  if (wanted("n")) check(r.n.size(), "n"), vector_array(out, "sheet_normal_n", r.n);
  if (wanted("phi")) check(r.phi.size(), "phi"), scalar_array(out, "phi", r.phi);
  for (const auto& [name, field] : r.potentials)
    if (wanted(name)) check(field.size(), name.c_str()), scalar_array(out, name, field);
  if (!r.bundle_id.empty() && wanted("bundle_id")) {
    check(r.bundle_id.size(), "bundle_id");
    out << "        <DataArray type=\"Int32\" Name=\"bundle_id\" format=\"ascii\">\n";
    for (int b : r.bundle_id) out << "          " << b << '\n';
    out << "        </DataArray>\n";
  }
  out << "      </PointData>\n"
      << "      <Points>\n"
      << "        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const auto& p : mesh.vertices()) {
    out << "          ";
    put(out, p.x);
    out << ' ';
    put(out, p.y);
    out << ' ';
    put(out, p.z);
    out << '\n';
  }
  out << "        </DataArray>\n"
      << "      </Points>\n"
      << "      <Cells>\n"
      << "        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  const int per_cell = vertices_per_cell(mesh.kind());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    out << "          ";
    const auto cell = mesh.cell(c);
    for (int i = 0; i < per_cell; ++i) out << (i ? " " : "") << cell[i];
    out << '\n';
  }
  out << "        </DataArray>\n"
      << "        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << "          " << (c + 1) * per_cell << '\n';
  out << "        </DataArray>\n"
      << "        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  const int type = mesh.kind() == ElementKind::Tet4 ? 10 : 12;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << "          " << type << '\n';
  out << "        </DataArray>\n"
      << "      </Cells>\n"
      << "    </Piece>\n"
      << "  </UnstructuredGrid>\n"
      << "</VTKFile>\n";
}

std::filesystem::path write_vtu(const Mesh& mesh, const FiberResult& result, const OutputSpec& spec) {
  if (!spec.enabled) throw Error(Errc::DisabledOutput, "output is disabled");
  if (spec.filename.empty()) throw Error(Errc::IoError, "empty output filename");
  auto path = spec.filename;
  if (path.extension() != ".vtu") path += ".vtu";
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  write_vtu(out, mesh, result, spec.fields);
  out.flush();
  if (!out) throw Error(Errc::IoError, "error while writing '" + path.string() + "'");
  return path;
}

VtuData parse_vtu(const std::string& text) {
  VtuData data;
  std::vector<double> offsets, types;
  bool in_point_data = false, in_points = false, in_cells = false;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const auto close = text.find('>', pos);
    if (close == std::string::npos) throw Error(Errc::IoError, "truncated vtu file");
    const std::string_view tag(text.data() + pos, close - pos + 1);
    pos = close + 1;
    if (tag.starts_with("<PointData")) in_point_data = true;
    else if (tag.starts_with("</PointData")) in_point_data = false;
    else if (tag.starts_with("<Points")) in_points = true;
    else if (tag.starts_with("</Points")) in_points = false;
    else if (tag.starts_with("<Cells")) in_cells = true;
    else if (tag.starts_with("</Cells")) in_cells = false;
    else if (tag.starts_with("<DataArray")) {
      const auto end = text.find("</DataArray>", pos);
      if (end == std::string::npos) throw Error(Errc::IoError, "unterminated DataArray");
      if (attribute(tag, "format") != "ascii") throw Error(Errc::IoError, "only ascii vtu arrays are supported");
      std::vector<double> values;
      const char* p = text.data() + pos;
      const char* stop = text.data() + end;
      while (true) {
        while (p < stop && std::isspace(static_cast<unsigned char>(*p))) ++p;
        if (p == stop) break;
        double x = 0.0;
        const auto [next, ec] = std::from_chars(p, stop, x);
        if (ec != std::errc()) throw Error(Errc::IoError, "non-numeric data in DataArray");
        values.push_back(x);
        p = next;
      }
      pos = end;
      const std::string name = attribute(tag, "Name");
      const std::string comps = attribute(tag, "NumberOfComponents");
      const int nc = comps.empty() ? 1 : std::stoi(comps);
      if (in_points) {
        if (nc != 3 || values.size() % 3) throw Error(Errc::IoError, "points must have three components");
        for (std::size_t i = 0; i < values.size(); i += 3) data.points.push_back({values[i], values[i + 1], values[i + 2]});
      } else if (in_cells && name == "connectivity") {
        for (double x : values) data.connectivity.push_back(static_cast<VertexId>(x));
      } else if (in_cells && name == "offsets") {
        offsets = std::move(values);
      } else if (in_cells && name == "types") {
        types = std::move(values);
      } else if (in_point_data) {
        data.point_data[name] = {nc, std::move(values)};
      }
    }
  }
  if (types.empty()) throw Error(Errc::EmptyMesh, "vtu file has no cells");
  const double type = types.front();
  if (std::any_of(types.begin(), types.end(), [type](double t) { return t != type; }))
    throw Error(Errc::MixedElementKinds, "vtu file mixes cell types");
  if (type == 10)
    data.kind = ElementKind::Tet4;
  else if (type == 12)
    data.kind = ElementKind::Hex8;
  else
    throw Error(Errc::UnsupportedElementType, "unsupported VTK cell type " + std::to_string(static_cast<int>(type)));
  if (data.connectivity.size() != types.size() * vertices_per_cell(data.kind) || offsets.size() != types.size())
    throw Error(Errc::MalformedMesh, "inconsistent vtu cell arrays");
  for (const auto& [name, array] : data.point_data)
    if (array.values.size() != data.points.size() * array.components)
      throw Error(Errc::MalformedMesh, "point array '" + name + "' does not match the number of points");
  return data;
}

VtuData read_vtu(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_vtu(buffer.str());
}

Mesh VtuData::mesh() const { return Mesh(kind, points, connectivity, {}, {}); }

VectorField VtuData::vectors(const std::string& name) const {
  const auto it = point_data.find(name);
  if (it == point_data.end() || it->second.components != 3)
    throw Error(Errc::IoError, "vtu file has no vector array '" + name + "'");
  VectorField out;
  const auto& v = it->second.values;
  for (std::size_t i = 0; i < v.size(); i += 3) out.push_back({v[i], v[i + 1], v[i + 2]});
  return out;
}

}  // namespace fibergen
