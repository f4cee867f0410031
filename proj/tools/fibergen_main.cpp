// fibergen executable: the parameter-file driver plus small mesh utilities.
//
//   fibergen [-h] [-g [minimal|full]] [-f FILE] [-o DIR] [-l FILE] [-d]
//   fibergen mesh slab|shell|ventricle|ventricle-complete|atrium ...
//   fibergen stats MESH
//   fibergen compare COARSE.vtu REFERENCE.vtu [--csv FILE]

#include <CLI11.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "fibergen/fibergen.h"

namespace {

int report(fg_status status) {
  if (status != FG_OK) std::cerr << "error: " << fg_last_error() << '\n';
  return status;
}

int mesh_command(const std::string& shape, const std::string& kind_name, const std::string& out, int version,
                 double scale, int nx, int ny, int nz, double lx, double ly, double lz, double r_in, double r_out,
                 int n_surface, int n_layers) {
  const fg_element_kind kind = kind_name == "hex" ? FG_HEX8 : FG_TET4;
  fg_mesh* mesh = nullptr;
  fg_status st;
  if (shape == "slab")
    st = fg_mesh_generate_slab(lx, ly, lz, nx, ny, nz, kind, &mesh);
  else if (shape == "shell")
    st = fg_mesh_generate_shell(r_in, r_out, n_surface, n_layers, kind, &mesh);
  else if (shape == "atrium")
    st = fg_mesh_generate_atrium(r_in, r_out, n_surface, n_layers, kind, &mesh);
  else
    st = fg_mesh_generate_ventricle(shape == "ventricle-complete", n_surface, n_layers, kind, &mesh);
  if (st != FG_OK) return report(st);
  if (scale != 1.0) {
    fg_mesh* scaled = nullptr;
    st = fg_mesh_scale(mesh, scale, &scaled);
    fg_mesh_free(mesh);
    if (st != FG_OK) return report(st);
    mesh = scaled;
  }
  st = fg_mesh_write(mesh, out.c_str(), version);
  if (st == FG_OK)
    std::cout << "Wrote " << out << ": " << fg_mesh_num_cells(mesh) << " cells, " << fg_mesh_num_vertices(mesh)
              << " vertices\n";
  fg_mesh_free(mesh);
  return report(st);
}

int stats_command(const std::string& path) {
  fg_mesh* mesh = nullptr;
  if (fg_status st = fg_mesh_read(path.c_str(), &mesh); st != FG_OK) return report(st);
  fg_mesh_stats s{};
  const fg_status st = fg_mesh_statistics(mesh, &s);
  if (st == FG_OK) {
    std::printf("kind        %s\n", fg_mesh_kind(mesh) == FG_HEX8 ? "hex" : "tet");
    std::printf("elements    %zu\n", s.n_elements);
    std::printf("vertices    %zu\n", s.n_vertices);
    std::printf("h_min       %.6g\n", s.h_min);
    std::printf("h_avg       %.6g\n", s.h_avg);
    std::printf("h_max       %.6g\n", s.h_max);
    std::printf("quality_max %.6g\n", s.quality_max);
  }
  fg_mesh_free(mesh);
  return report(st);
}

int compare_command(const std::string& coarse, const std::string& reference, const std::string& csv) {
  fg_sensitivity s{};
  double* dtheta = nullptr;
  if (fg_status st = fg_compare_vtu(coarse.c_str(), reference.c_str(), &s, csv.empty() ? nullptr : &dtheta);
      st != FG_OK)
    return report(st);
  std::printf("%-24s %s\n", "coarse", coarse.c_str());
  std::printf("%-24s %s\n", "reference", reference.c_str());
  std::printf("%-24s %zu\n", "reference vertices", s.n_points);
  std::printf("%-24s %zu\n", "outside coarse mesh", s.n_outside);
  std::printf("avg_deg=%.6f\n", s.avg_deg);
  std::printf("max_deg=%.6f\n", s.max_deg);
  if (dtheta) {
    std::ofstream out(csv);
    out << "vertex_id,dtheta_deg\n";
    for (std::size_t i = 0; i < s.n_points; ++i) out << i << ',' << dtheta[i] << '\n';
    fg_free(dtheta);
    if (!out) {
      std::cerr << "error: cannot write " << csv << '\n';
      return FG_ERR_MESH_IO;
    }
  }
  return 0;
}

bool is_tool(const char* arg) {
  return std::strcmp(arg, "mesh") == 0 || std::strcmp(arg, "stats") == 0 || std::strcmp(arg, "compare") == 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || !is_tool(argv[1])) return fg_cli_main(argc, argv);

  CLI::App app{"fibergen mesh utilities"};
  app.require_subcommand(1);

  auto* mesh = app.add_subcommand("mesh", "Generate an idealized test mesh in Gmsh format");
  std::string shape, kind = "tet", out;
  int version = 41, nx = 8, ny = 8, nz = 8, n_surface = 8, n_layers = 2;
  double scale = 1.0, lx = 1, ly = 1, lz = 1, r_in = 20, r_out = 25;
  mesh->add_option("shape", shape, "slab, shell, ventricle, ventricle-complete or atrium")
      ->required()
      ->check(CLI::IsMember({"slab", "shell", "ventricle", "ventricle-complete", "atrium"}));
  mesh->add_option("-o,--output", out, "Output .msh file")->required();
  mesh->add_option("-k,--kind", kind, "Element kind")->check(CLI::IsMember({"tet", "hex"}));
  mesh->add_option("--msh-version", version, "Gmsh format version (41 or 22)")->check(CLI::IsMember({41, 22}));
  mesh->add_option("--scale", scale, "Factor applied to all coordinates");
  mesh->add_option("--nx", nx, "Slab divisions along x");
  mesh->add_option("--ny", ny, "Slab divisions along y");
  mesh->add_option("--nz", nz, "Slab divisions along z");
  mesh->add_option("--lx", lx, "Slab extent along x");
  mesh->add_option("--ly", ly, "Slab extent along y");
  mesh->add_option("--lz", lz, "Slab extent along z");
  mesh->add_option("--r-inner", r_in, "Inner radius (shell, atrium)");
  mesh->add_option("--r-outer", r_out, "Outer radius (shell, atrium)");
  mesh->add_option("--n-surface", n_surface, "Surface divisions per cube face edge");
  mesh->add_option("--n-layers", n_layers, "Layers through the wall");

  auto* stats = app.add_subcommand("stats", "Print size and quality statistics of a mesh");
  std::string stats_path;
  stats->add_option("mesh", stats_path, "Gmsh file")->required();

  auto* compare = app.add_subcommand("compare", "Angle error of a coarse fiber field against a reference");
  std::string coarse, reference, csv;
  compare->add_option("coarse", coarse, "Coarse .vtu")->required();
  compare->add_option("reference", reference, "Reference .vtu")->required();
  compare->add_option("--csv", csv, "Per-vertex errors (vertex_id,dtheta_deg)");

  CLI11_PARSE(app, argc, argv);
  if (mesh->parsed())
    return mesh_command(shape, kind, out, version, scale, nx, ny, nz, lx, ly, lz, r_in, r_out, n_surface, n_layers);
  if (stats->parsed()) return stats_command(stats_path);
  return compare_command(coarse, reference, csv);
}
