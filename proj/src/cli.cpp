#include "fibergen/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "fibergen/error.hpp"
#include "fibergen/fiber_params.hpp"
#include "fibergen/gmsh.hpp"
#include "fibergen/output.hpp"

namespace fibergen::cli {

namespace fs = std::filesystem;

namespace {

struct Flag {
  const char* short_name;
  const char* long_name;
};

constexpr Flag kHelp{"-h", "--help"};
constexpr Flag kGenerate{"-g", "--generate-params"};
constexpr Flag kParams{"-f", "--params-filename"};
constexpr Flag kOutput{"-o", "--output-directory"};
constexpr Flag kLog{"-l", "--log-file"};
constexpr Flag kDryRun{"-d", "--dry-run"};
constexpr Flag kAll[] = {kHelp, kGenerate, kParams, kOutput, kLog, kDryRun};

bool is(const std::string& arg, const Flag& f) { return arg == f.short_name || arg == f.long_name; }

bool is_flag(const std::string& arg) {
  for (const auto& f : kAll)
    if (is(arg, f)) return true;
  return false;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open parameter file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  out.flush();
  if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
}

const std::string kMeshFile = std::string(kParamRoot) + "/Mesh and space discretization/File/Filename";

Mesh load_mesh(const RunSettings& s) {
  if (s.mesh_file.empty()) throw Error(Errc::IoError, "no mesh file given in '" + kMeshFile + "'");
  Mesh mesh = read_gmsh(s.mesh_file);
  if (mesh.kind() != s.element)
    throw Error(Errc::ElementTypeMismatch,
                "mesh '" + s.mesh_file + "' has " + (mesh.kind() == ElementKind::Tet4 ? "tetrahedral" : "hexahedral") +
                    " cells but Element type is " + (s.element == ElementKind::Tet4 ? "Tet" : "Hex"));
  mesh = scale_mesh(mesh, s.scaling);
  if (s.refinements > 0) {
    if (mesh.kind() != ElementKind::Hex8)
      throw Error(Errc::NotHexMesh, "Number of refinements > 0 requires a hexahedral mesh");
    mesh = refine_hex_uniform(mesh, s.refinements);
  }
  return mesh;
}

}  // namespace

CliOptions parse_cli(const std::vector<std::string>& args) {
  CliOptions o;
  if (!args.empty() && !args[0].empty()) o.executable_name = fs::path(args[0]).stem().string();
  std::optional<fs::path> params, log;

  // "--name=value" is accepted for the flags that take a value.
  std::vector<std::string> expanded;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const auto eq = args[i].find('=');
    if (args[i].starts_with("--") && eq != std::string::npos) {
      expanded.push_back(args[i].substr(0, eq));
      expanded.push_back(args[i].substr(eq + 1));
    } else {
      expanded.push_back(args[i]);
    }
  }

  bool help = false, generate = false;
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    const std::string& arg = expanded[i];
    const auto value = [&]() -> std::string {
      if (i + 1 >= expanded.size() || is_flag(expanded[i + 1]))
        throw Error(Errc::MissingFlagArgument, "flag " + arg + " requires an argument");
      return expanded[++i];
    };
    if (is(arg, kHelp)) {
      help = true;
    } else if (is(arg, kGenerate)) {
      generate = true;
      if (i + 1 < expanded.size()) {
        const std::string& next = expanded[i + 1];
        if (next == "minimal") o.generate_verbosity = params::Verbosity::Minimal, ++i;
        else if (next == "full") o.generate_verbosity = params::Verbosity::Full, ++i;
        else if (next == "standard") o.generate_verbosity = params::Verbosity::Standard, ++i;
      }
    } else if (is(arg, kParams)) {
      params = value();
    } else if (is(arg, kOutput)) {
      o.output_dir = value();
    } else if (is(arg, kLog)) {
      log = value();
    } else if (is(arg, kDryRun)) {
      o.dry_run = true;
    } else if (arg.starts_with("-")) {
      throw Error(Errc::UnknownFlag, "unknown flag '" + arg + "' (see -h)");
    } else {
      throw Error(Errc::UnknownFlag, "unexpected argument '" + arg + "' (see -h)");
    }
  }

  o.mode = help ? Mode::Help : generate ? Mode::Generate : Mode::Run;
  o.params_path = params ? *params : fs::path(o.executable_name + ".prm");
  o.params_format = params::format_from_extension(o.params_path);
  const std::string input_ext = params::extension_of(o.params_format);
  if (!log) {
    o.log_filename = "log_params." + input_ext;
  } else {
    o.log_filename = *log;
    if (!o.log_filename.has_extension()) o.log_filename += "." + input_ext;
  }
  o.log_format = params::format_from_extension(o.log_filename);
  return o;
}

std::string help_text(const std::string& exe) {
  std::ostringstream out;
  out << "Usage: " << exe << " [option...]\n"
      << "       " << exe << " mesh|stats|compare ... (see " << exe << " <command> --help)\n\n"
      << "Options:\n"
      << "  -h, --help                    Print this help and exit.\n"
      << "  -g, --generate-params [LEVEL] Write the default parameter file and exit;\n"
      << "                                LEVEL is minimal, standard (default) or full.\n"
      << "  -f, --params-filename FILE    Parameter file to read or generate (.prm, .json\n"
      << "                                or .xml); default " << exe << ".prm.\n"
      << "  -o, --output-directory DIR    Directory for all output, created if needed;\n"
      << "                                default is the current directory.\n"
      << "  -l, --log-file FILE           Parameter log file in the output directory;\n"
      << "                                default log_params.<ext of -f>.\n"
      << "  -d, --dry-run                 Stop after writing the parameter log.\n";
  return out.str();
}

int execute(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const auto fail = [&err](const Error& e, const std::string& context) {
    err << "error: " << context << e.what() << '\n';
    return static_cast<int>(e.category());
  };

  switch (o.mode) {
    case Mode::Help:
      out << help_text(o.executable_name);
      return 0;

    case Mode::Generate:
      try {
        const auto tree = fiber_parameters();
        if (o.params_path.has_parent_path()) fs::create_directories(o.params_path.parent_path());
        write_text(o.params_path, tree.generate(o.params_format, o.generate_verbosity));
        out << "Parameter file written to " << o.params_path.string() << '\n';
        return 0;
      } catch (const Error& e) {
        return fail(e, "");
      } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::MeshOrIo);
      }

    case Mode::Run: break;
  }

  auto tree = fiber_parameters();
  RunSettings settings;
  fs::path log_path;
  try {
    tree.parse(read_text(o.params_path), o.params_format);
    settings = read_settings(tree);
    fs::create_directories(o.output_dir);
    log_path = o.output_dir / o.log_filename;
    if (log_path.has_parent_path()) fs::create_directories(log_path.parent_path());
    write_text(log_path, tree.generate(o.log_format, params::Verbosity::Full));
    out << "Parameter log written to " << log_path.string() << '\n';
  } catch (const Error& e) {
    return fail(e, "in parameter file '" + o.params_path.string() + "': ");
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::MeshOrIo);
  }
  if (o.dry_run) return 0;

  std::optional<Mesh> mesh;
  try {
    mesh.emplace(load_mesh(settings));
    const auto stats = mesh_statistics(*mesh);
    out << "Mesh: " << stats.n_elements << " cells, " << stats.n_vertices << " vertices, h in [" << stats.h_min
        << ", " << stats.h_max << "]\n";
  } catch (const Error& e) {
    return fail(e, "while loading mesh '" + settings.mesh_file + "': ");
  }

  FiberResult result;
  try {
    result = generate_fibers(*mesh, settings.geometry);
    for (const auto& line : result.log) out << line << '\n';
  } catch (const Error& e) {
    return fail(e, std::string("while generating ") + geometry_kind_name(settings.geometry.kind) + " fibers: ");
  }

  if (!settings.output_enabled) return 0;
  try {
    OutputSpec spec;
    spec.filename = o.output_dir / settings.output_name;
    const auto written = write_vtu(*mesh, result, spec);
    out << "Fibers written to " << written.string() << '\n';
  } catch (const Error& e) {
    return fail(e, "while writing output: ");
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliOptions options;
  try {
    options = parse_cli(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  }
  return execute(options, out, err);
}

}  // namespace fibergen::cli
