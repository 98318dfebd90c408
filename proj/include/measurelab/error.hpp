#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlab {

enum class Errc {
  OddN,
  BadDimension,
  NonpositiveLength,
  IndexOutOfRange,
  SizeMismatch,
  NonfiniteValue,
  NonpositiveMass,
  BadGrid,
  EmptyRegion,
  TooFewPoints,
  NonpositiveValue,
  BadReplicas,
  BasisMismatch,
  BadBasis,
  DependentSet,
  EmptySet,
  NotInSpan,
  NotIntegral,
  NotRefinement,
  ZeroLambda,
  GammaMismatch,
  BadArc,
  Overflow,
  Parse,
  Io,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::OddN: return "ODD_N";
    case Errc::BadDimension: return "BAD_DIMENSION";
    case Errc::NonpositiveLength: return "NONPOSITIVE_LENGTH";
    case Errc::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case Errc::SizeMismatch: return "SIZE_MISMATCH";
    case Errc::NonfiniteValue: return "NONFINITE_VALUE";
    case Errc::NonpositiveMass: return "NONPOSITIVE_MASS";
    case Errc::BadGrid: return "BAD_GRID";
    case Errc::EmptyRegion: return "EMPTY_REGION";
    case Errc::TooFewPoints: return "TOO_FEW_POINTS";
    case Errc::NonpositiveValue: return "NONPOSITIVE_VALUE";
    case Errc::BadReplicas: return "BAD_REPLICAS";
    case Errc::BasisMismatch: return "BASIS_MISMATCH";
    case Errc::BadBasis: return "BAD_BASIS";
    case Errc::DependentSet: return "DEPENDENT_SET";
    case Errc::EmptySet: return "EMPTY_SET";
    case Errc::NotInSpan: return "NOT_IN_SPAN";
    case Errc::NotIntegral: return "NOT_INTEGRAL";
    case Errc::NotRefinement: return "NOT_REFINEMENT";
    case Errc::ZeroLambda: return "ZERO_LAMBDA";
    case Errc::GammaMismatch: return "GAMMA_MISMATCH";
    case Errc::BadArc: return "BAD_ARC";
    case Errc::Overflow: return "OVERFLOW";
    case Errc::Parse: return "PARSE_ERROR";
    case Errc::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Every precondition failure in the library surfaces as an Error carrying a
/// machine-readable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mlab
