#include "fibergen/fibergen.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fibergen/analysis.hpp"
#include "fibergen/cli.hpp"
#include "fibergen/error.hpp"
#include "fibergen/fiber_params.hpp"
#include "fibergen/gmsh.hpp"
#include "fibergen/mesh_generators.hpp"
#include "fibergen/output.hpp"

struct fg_mesh {
  fibergen::Mesh mesh;
};

struct fg_params {
  fibergen::params::ParamTree tree;
};

struct fg_result {
  fibergen::FiberResult result;
};

namespace {

using namespace fibergen;

thread_local std::string last_error;
thread_local std::string last_code;

fg_status fail(fg_status status, std::string message, std::string code = {}) {
  last_error = std::move(message);
  last_code = std::move(code);
  return status;
}

template <class F>
fg_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    last_code.clear();
    return FG_OK;
  } catch (const Error& e) {
    return fail(static_cast<fg_status>(e.category()), e.what(), errc_name(e.code()));
  } catch (const std::invalid_argument& e) {
    return fail(FG_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FG_ERR_INTERNAL, e.what());
  }
}

#define FG_REQUIRE(cond)                                                                  \
  do {                                                                                    \
    if (!(cond)) return fail(FG_ERR_INVALID_ARGUMENT, "invalid argument: " #cond);       \
  } while (0)

char* copy_string(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

ElementKind kind_of(fg_element_kind k) { return k == FG_HEX8 ? ElementKind::Hex8 : ElementKind::Tet4; }

params::Format format_of(fg_format f) {
  switch (f) {
    case FG_FORMAT_JSON: return params::Format::Json;
    case FG_FORMAT_XML: return params::Format::Xml;
    default: return params::Format::Prm;
  }
}

}  // namespace

extern "C" {

const char* fg_version(void) { return "1.0.0"; }
const char* fg_last_error(void) { return last_error.c_str(); }
const char* fg_last_error_code(void) { return last_code.c_str(); }
void fg_free(void* p) { std::free(p); }

fg_status fg_mesh_read(const char* path, fg_mesh** out) {
  FG_REQUIRE(path && out);
  return guard([&] { *out = new fg_mesh{read_gmsh(path)}; });
}

fg_status fg_mesh_write(const fg_mesh* mesh, const char* path, int version) {
  FG_REQUIRE(mesh && path && (version == 41 || version == 22));
  return guard([&] { write_gmsh(mesh->mesh, path, version == 41 ? GmshVersion::V41 : GmshVersion::V22); });
}

fg_status fg_mesh_generate_slab(double lx, double ly, double lz, int nx, int ny, int nz, fg_element_kind kind,
                                fg_mesh** out) {
  FG_REQUIRE(out && lx > 0 && ly > 0 && lz > 0 && nx > 0 && ny > 0 && nz > 0);
  return guard([&] { *out = new fg_mesh{generate_slab_mesh({lx, ly, lz}, {nx, ny, nz}, kind_of(kind))}; });
}

fg_status fg_mesh_generate_shell(double r_inner, double r_outer, int n_surface, int n_layers, fg_element_kind kind,
                                 fg_mesh** out) {
  FG_REQUIRE(out && r_inner > 0 && r_outer > r_inner && n_surface > 0 && n_layers > 0);
  return guard([&] { *out = new fg_mesh{generate_shell_mesh(r_inner, r_outer, n_surface, n_layers, kind_of(kind))}; });
}

fg_status fg_mesh_generate_ventricle(int complete, int n_surface, int n_layers, fg_element_kind kind, fg_mesh** out) {
  FG_REQUIRE(out && n_surface > 0 && n_surface % 2 == 0 && n_layers > 0);
  return guard([&] {
    VentricleShape shape;
    shape.complete = complete != 0;
    shape.n_surface = n_surface;
    shape.n_layers = n_layers;
    shape.kind = kind_of(kind);
    *out = new fg_mesh{generate_ventricle_mesh(shape)};
  });
}

fg_status fg_mesh_generate_atrium(double r_inner, double r_outer, int n_surface, int n_layers, fg_element_kind kind,
                                  fg_mesh** out) {
  FG_REQUIRE(out && r_inner > 0 && r_outer > r_inner && n_surface > 0 && n_layers > 0);
  return guard(
      [&] { *out = new fg_mesh{generate_atrium_mesh(r_inner, r_outer, n_surface, n_layers, kind_of(kind))}; });
}

fg_status fg_mesh_scale(const fg_mesh* mesh, double factor, fg_mesh** out) {
  FG_REQUIRE(mesh && out);
  return guard([&] { *out = new fg_mesh{scale_mesh(mesh->mesh, factor)}; });
}

fg_status fg_mesh_refine(const fg_mesh* mesh, int steps, fg_mesh** out) {
  FG_REQUIRE(mesh && out && steps >= 0);
  return guard([&] { *out = new fg_mesh{refine_hex_uniform(mesh->mesh, steps)}; });
}

size_t fg_mesh_num_vertices(const fg_mesh* mesh) { return mesh ? mesh->mesh.num_vertices() : 0; }
size_t fg_mesh_num_cells(const fg_mesh* mesh) { return mesh ? mesh->mesh.num_cells() : 0; }
fg_element_kind fg_mesh_kind(const fg_mesh* mesh) {
  return mesh && mesh->mesh.kind() == ElementKind::Hex8 ? FG_HEX8 : FG_TET4;
}

fg_status fg_mesh_vertices(const fg_mesh* mesh, double* xyz) {
  FG_REQUIRE(mesh && xyz);
  for (const auto& v : mesh->mesh.vertices()) {
    *xyz++ = v.x;
    *xyz++ = v.y;
    *xyz++ = v.z;
  }
  return FG_OK;
}

fg_status fg_mesh_statistics(const fg_mesh* mesh, fg_mesh_stats* out) {
  FG_REQUIRE(mesh && out);
  return guard([&] {
    const auto s = mesh_statistics(mesh->mesh);
    *out = {s.h_min, s.h_avg, s.h_max, s.quality_max, s.n_elements, s.n_vertices};
  });
}

void fg_mesh_free(fg_mesh* mesh) { delete mesh; }

fg_status fg_params_create(fg_params** out) {
  FG_REQUIRE(out);
  return guard([&] { *out = new fg_params{fiber_parameters()}; });
}

fg_status fg_params_parse(fg_params* params, const char* text, fg_format format) {
  FG_REQUIRE(params && text);
  return guard([&] { params->tree.parse(text, format_of(format)); });
}

fg_status fg_params_read_file(fg_params* params, const char* path) {
  FG_REQUIRE(params && path);
  return guard([&] {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, std::string("cannot open parameter file '") + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    params->tree.parse(buffer.str(), params::format_from_extension(path));
  });
}

fg_status fg_params_set(fg_params* params, const char* path, const char* value) {
  FG_REQUIRE(params && path && value);
  return guard([&] { params->tree.set(path, value); });
}

fg_status fg_params_get(const fg_params* params, const char* path, char** value) {
  FG_REQUIRE(params && path && value);
  return guard([&] { *value = copy_string(params->tree.get(path)); });
}

fg_status fg_params_generate(const fg_params* params, fg_format format, fg_verbosity verbosity, char** text) {
  FG_REQUIRE(params && text);
  return guard([&] {
    *text = copy_string(params->tree.generate(format_of(format), static_cast<params::Verbosity>(verbosity)));
  });
}

void fg_params_free(fg_params* params) { delete params; }

fg_status fg_generate_fibers(const fg_mesh* mesh, const fg_params* params, fg_result** out) {
  FG_REQUIRE(mesh && params && out);
  return guard([&] {
    const auto settings = read_settings(params->tree);
    *out = new fg_result{generate_fibers(mesh->mesh, settings.geometry)};
  });
}

size_t fg_result_num_vertices(const fg_result* result) { return result ? result->result.phi.size() : 0; }

fg_status fg_result_vectors(const fg_result* result, const char* name, double* out) {
  FG_REQUIRE(result && name && out);
  const std::string n = name;
  const VectorField* field = n == "f" ? &result->result.f : n == "s" ? &result->result.s : n == "n" ? &result->result.n
                                                                                                       : nullptr;
  if (!field) return fail(FG_ERR_INVALID_ARGUMENT, "unknown vector field '" + n + "'");
  for (const auto& v : *field) {
    *out++ = v.x;
    *out++ = v.y;
    *out++ = v.z;
  }
  return FG_OK;
}

fg_status fg_result_scalars(const fg_result* result, const char* name, double* out) {
  FG_REQUIRE(result && name && out);
  const std::string n = name;
  const ScalarField* field = n == "phi" ? &result->result.phi : result->result.potential(n);
  if (!field) return fail(FG_ERR_INVALID_ARGUMENT, "unknown scalar field '" + n + "'");
  std::copy(field->begin(), field->end(), out);
  return FG_OK;
}

fg_status fg_result_bundles(const fg_result* result, int* out) {
  FG_REQUIRE(result && out);
  if (result->result.bundle_id.empty()) return fail(FG_ERR_INVALID_ARGUMENT, "result has no bundle ids");
  std::copy(result->result.bundle_id.begin(), result->result.bundle_id.end(), out);
  return FG_OK;
}

fg_status fg_write_vtu(const fg_mesh* mesh, const fg_result* result, const char* path) {
  FG_REQUIRE(mesh && result && path);
  return guard([&] {
    OutputSpec spec;
    spec.filename = path;
    write_vtu(mesh->mesh, result->result, spec);
  });
}

void fg_result_free(fg_result* result) { delete result; }

fg_status fg_compare_vtu(const char* coarse_path, const char* reference_path, fg_sensitivity* out, double** dtheta) {
  FG_REQUIRE(coarse_path && reference_path && out);
  return guard([&] {
    const auto coarse = read_vtu(coarse_path);
    const auto reference = read_vtu(reference_path);
    const auto report =
        compare_fibers(coarse.mesh(), coarse.vectors("fiber_f"), reference.mesh(), reference.vectors("fiber_f"));
    *out = {report.avg_error, report.max_error, report.dtheta.size(), report.n_points_outside};
    if (dtheta) {
      *dtheta = static_cast<double*>(std::malloc(std::max<std::size_t>(1, report.dtheta.size()) * sizeof(double)));
      if (!*dtheta) throw std::bad_alloc();
      std::copy(report.dtheta.begin(), report.dtheta.end(), *dtheta);
    }
  });
}

int fg_cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return cli::run(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return FG_ERR_INTERNAL;
  }
}

}  // extern "C"
