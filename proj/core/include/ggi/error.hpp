#pragma once

#include <stdexcept>
#include <string>

namespace ggi {

enum class Errc {
  MalformedJson,
  SchemaViolation,
  InvariantViolation,
  EmptyPattern,
  DegeneratePanel,
  ZeroNormal,
  UnknownPanelType,
  UvOutsidePlacement,
  NonFiniteVertex,
  EmptyRaster,
  ChainCountMismatch,
  BrokenChain,
  ClosedLoopChain,
  ShapeMismatch,
  NormMismatch,
  EmptySet,
  EmptyMesh,
  BadParams,
  Io,
  FormatVersionMismatch,
  ChecksumMismatch,
  ParseError,
  IndexOutOfRange,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace ggi
