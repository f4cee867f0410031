#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fibergen/params.hpp"

namespace fibergen::cli {

enum class Mode { Help, Generate, Run };

struct CliOptions {
  Mode mode = Mode::Run;
  std::string executable_name = "fibergen";
  std::filesystem::path params_path;  // defaults to <executable_name>.prm
  params::Format params_format = params::Format::Prm;
  std::filesystem::path output_dir = ".";
  std::filesystem::path log_filename;  // relative to output_dir
  params::Format log_format = params::Format::Prm;
  bool dry_run = false;
  params::Verbosity generate_verbosity = params::Verbosity::Standard;
};

/// args[0] is the program path.
CliOptions parse_cli(const std::vector<std::string>& args);

std::string help_text(const std::string& executable_name);

/// Runs the selected mode and returns the process exit status: 0 on success,
/// 1 for parameter errors, 2 for mesh and I/O errors, 3 for solver errors.
int execute(const CliOptions& options, std::ostream& out, std::ostream& err);

/// parse_cli followed by execute, with errors reported on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fibergen::cli
