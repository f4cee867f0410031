#pragma once

#include <stdexcept>
#include <string>

namespace fibergen {

enum class Errc {
  // mesh ingestion and manipulation
  UnsupportedVersion,
  BinaryFormatUnsupported,
  MixedElementKinds,
  UnsupportedElementType,
  DanglingIndex,
  InvalidBoundaryFace,
  MalformedMesh,
  NonPositiveFactor,
  NotHexMesh,
  EmptyMesh,
  ElementTypeMismatch,
  DegenerateCell,
  IoError,
  // parameters and command line
  DuplicateEntry,
  EmptyName,
  UnknownEntry,
  UnknownSubsection,
  PatternMismatch,
  SyntaxError,
  UnknownFlag,
  MissingFlagArgument,
  UnsupportedDegree,
  LabelRoleMissing,
  MissingApex,
  ZeroVector,
  // linear algebra
  NoDirichlet,
  ConflictingDirichlet,
  NoConvergence,
  // fiber drivers
  EmptyBoundarySet,
  OverlappingRings,
  // output and analysis
  DisabledOutput,
  LengthMismatch,
};

/// Coarse grouping used for process exit codes and the C API status.
enum class ErrorCategory { Parameter = 1, MeshOrIo = 2, Solver = 3 };

ErrorCategory category_of(Errc code);
const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  Errc code_;
};

}  // namespace fibergen
