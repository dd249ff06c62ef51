#include "ggi/error.hpp"

namespace ggi {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedJson: return "MalformedJson";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::EmptyPattern: return "EmptyPattern";
    case Errc::DegeneratePanel: return "DegeneratePanel";
    case Errc::ZeroNormal: return "ZeroNormal";
    case Errc::UnknownPanelType: return "UnknownPanelType";
    case Errc::UvOutsidePlacement: return "UvOutsidePlacement";
    case Errc::NonFiniteVertex: return "NonFiniteVertex";
    case Errc::EmptyRaster: return "EmptyRaster";
    case Errc::ChainCountMismatch: return "ChainCountMismatch";
    case Errc::BrokenChain: return "BrokenChain";
    case Errc::ClosedLoopChain: return "ClosedLoopChain";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NormMismatch: return "NormMismatch";
    case Errc::EmptySet: return "EmptySet";
    case Errc::EmptyMesh: return "EmptyMesh";
    case Errc::BadParams: return "BadParams";
    case Errc::Io: return "Io";
    case Errc::FormatVersionMismatch: return "FormatVersionMismatch";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
  }
  return "Unknown";
}

}  // namespace ggi
