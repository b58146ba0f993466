// common.hpp — shared scalar types, tags and the library error model

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace sshbath {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

// Classification tolerance for phase/region boundaries, relative to J2.
inline constexpr double kBoundaryTol = 1e-12;

enum class Sheet { First, Second };
enum class Variant { Closed, Physical, Mirage };
enum class Sublattice { A, B };
enum class Boundary { PBC, OBC };

enum class ErrorCode {
  MirageUndefined,
  OnPhaseBoundary,
  OnBranchLoop,
  DegenerateQuadratic,
  NearSpectrum,
  NoConvergence,
  RootOnSpectrum,
  WindowTooSmall,
  NotMidgap,
  SingularMatrix,
  ContourTooLow,
  AliasingDetected,
  NoOscillationDetected,
  ContourPinched,
  PiZero,
  StepUnderflow,
  DimensionTooLarge,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

// Complex frequency with the Riemann-sheet it lives on.
struct ComplexFreq {
  cplx value{0.0, 0.0};
  Sheet sheet{Sheet::First};
};

inline const char* sheet_name(Sheet s) { return s == Sheet::First ? "first" : "second"; }
inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Closed: return "closed";
    case Variant::Physical: return "physical";
    default: return "mirage";
  }
}
inline const char* sublattice_name(Sublattice s) { return s == Sublattice::A ? "A" : "B"; }

}  // namespace sshbath
