#include "fibergen/error.hpp"

namespace fibergen {

ErrorCategory category_of(Errc code) {
  switch (code) {
    case Errc::DuplicateEntry:
    case Errc::EmptyName:
    case Errc::UnknownEntry:
    case Errc::UnknownSubsection:
    case Errc::PatternMismatch:
    case Errc::SyntaxError:
    case Errc::UnknownFlag:
    case Errc::MissingFlagArgument:
    case Errc::UnsupportedDegree:
    case Errc::LabelRoleMissing:
    case Errc::MissingApex:
    case Errc::ZeroVector:
      return ErrorCategory::Parameter;
    case Errc::NoDirichlet:
    case Errc::ConflictingDirichlet:
    case Errc::NoConvergence:
    case Errc::LengthMismatch:
      return ErrorCategory::Solver;
    default:
      return ErrorCategory::MeshOrIo;
  }
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::BinaryFormatUnsupported: return "BinaryFormatUnsupported";
    case Errc::MixedElementKinds: return "MixedElementKinds";
    case Errc::UnsupportedElementType: return "UnsupportedElementType";
    case Errc::DanglingIndex: return "DanglingIndex";
    case Errc::InvalidBoundaryFace: return "InvalidBoundaryFace";
    case Errc::MalformedMesh: return "MalformedMesh";
    case Errc::NonPositiveFactor: return "NonPositiveFactor";
    case Errc::NotHexMesh: return "NotHexMesh";
    case Errc::EmptyMesh: return "EmptyMesh";
    case Errc::ElementTypeMismatch: return "ElementTypeMismatch";
    case Errc::DegenerateCell: return "DegenerateCell";
    case Errc::IoError: return "IoError";
    case Errc::DuplicateEntry: return "DuplicateEntry";
    case Errc::EmptyName: return "EmptyName";
    case Errc::UnknownEntry: return "UnknownEntry";
    case Errc::UnknownSubsection: return "UnknownSubsection";
    case Errc::PatternMismatch: return "PatternMismatch";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownFlag: return "UnknownFlag";
    case Errc::MissingFlagArgument: return "MissingFlagArgument";
    case Errc::UnsupportedDegree: return "UnsupportedDegree";
    case Errc::LabelRoleMissing: return "LabelRoleMissing";
    case Errc::MissingApex: return "MissingApex";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NoDirichlet: return "NoDirichlet";
    case Errc::ConflictingDirichlet: return "ConflictingDirichlet";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EmptyBoundarySet: return "EmptyBoundarySet";
    case Errc::OverlappingRings: return "OverlappingRings";
    case Errc::DisabledOutput: return "DisabledOutput";
    case Errc::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

}  // namespace fibergen
