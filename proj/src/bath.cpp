#include "sshbath/bath.hpp"

#include <algorithm>
#include <cmath>

#include "sshbath/selfenergy.hpp"

namespace sshbath {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MirageUndefined: return "MirageUndefined";
    case ErrorCode::OnPhaseBoundary: return "OnPhaseBoundary";
    case ErrorCode::OnBranchLoop: return "OnBranchLoop";
    case ErrorCode::DegenerateQuadratic: return "DegenerateQuadratic";
    case ErrorCode::NearSpectrum: return "NearSpectrum";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RootOnSpectrum: return "RootOnSpectrum";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::NotMidgap: return "NotMidgap";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ContourTooLow: return "ContourTooLow";
    case ErrorCode::AliasingDetected: return "AliasingDetected";
    case ErrorCode::NoOscillationDetected: return "NoOscillationDetected";
    case ErrorCode::ContourPinched: return "ContourPinched";
    case ErrorCode::PiZero: return "PiZero";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* phase_name(Phase ph) {
  switch (ph) {
    case Phase::TopologicalLineGap: return "topological-line-gap";
    case Phase::PointGap: return "point-gap";
    case Phase::TrivialLineGap: return "trivial-line-gap";
    case Phase::Topological: return "topological";
    case Phase::Trivial: return "trivial";
  }
  return "?";
}

void BathParams::validate() const {
  if (!(j2 > 0.0)) fail(ErrorCode::InvalidArgument, "j2 must be > 0");
  if (j1 < 0.0) fail(ErrorCode::InvalidArgument, "j1 must be >= 0");
  if (gamma_b < 0.0) fail(ErrorCode::InvalidArgument, "gamma_b must be >= 0");
}

MirageParams mirage_map(const BathParams& p) {
  p.validate();
  if (!(p.j1 > 0.5 * p.gamma_b))
    fail(ErrorCode::MirageUndefined, "mirage bath requires j1 > gamma_b/2");
  MirageParams m;
  m.j1_tilde = std::sqrt(p.j1 * p.j1 - 0.25 * p.gamma_b * p.gamma_b);
  m.r = std::sqrt(p.jm() / p.jp());
  return m;
}

cplx dispersion(const BathParams& p, double k, int band, Variant variant) {
  p.validate();
  const double sgn = band >= 0 ? 1.0 : -1.0;
  switch (variant) {
    case Variant::Closed: {
      const double a = p.j1 + p.j2 * std::cos(k);
      const double b = p.j2 * std::sin(k);
      return sgn * std::sqrt(a * a + b * b);
    }
    case Variant::Physical: {
      const cplx a = p.j1 + p.j2 * std::cos(k);
      const cplx b = p.j2 * std::sin(k) + 0.5 * I * p.gamma_b;
      return -0.5 * I * p.gamma_b + sgn * std::sqrt(a * a + b * b);
    }
    case Variant::Mirage: {
      const MirageParams m = mirage_map(p);
      const double a = m.j1_tilde + p.j2 * std::cos(k);
      const double b = p.j2 * std::sin(k);
      return -0.5 * I * p.gamma_b + sgn * std::sqrt(a * a + b * b);
    }
  }
  fail(ErrorCode::InvalidArgument, "bad variant");
}

Phase classify_phase(const BathParams& p) {
  p.validate();
  const GapBoundaries g = gap_boundaries(p);
  const double tol = kBoundaryTol * p.j2;
  if (std::abs(p.j1 - g.physical_lower) < tol || std::abs(p.j1 - g.physical_upper) < tol)
    fail(ErrorCode::OnPhaseBoundary, "j1 at a physical gap closing");
  if (p.j1 < g.physical_lower) return Phase::TopologicalLineGap;
  if (p.j1 > g.physical_upper) return Phase::TrivialLineGap;
  return Phase::PointGap;
}

Phase classify_mirage_phase(const BathParams& p) {
  p.validate();
  if (!(p.j1 > 0.5 * p.gamma_b))
    fail(ErrorCode::MirageUndefined, "mirage bath requires j1 > gamma_b/2");
  const double boundary = gap_boundaries(p).mirage;
  if (std::abs(p.j1 - boundary) < kBoundaryTol * p.j2)
    fail(ErrorCode::OnPhaseBoundary, "j1 at the mirage gap closing");
  return p.j1 < boundary ? Phase::Topological : Phase::Trivial;
}

GapBoundaries gap_boundaries(const BathParams& p) {
  p.validate();
  GapBoundaries g;
  g.physical_lower = p.j2 - 0.5 * p.gamma_b;
  g.physical_upper = p.j2 + 0.5 * p.gamma_b;
  g.mirage = std::sqrt(p.j2 * p.j2 + 0.25 * p.gamma_b * p.gamma_b);
  return g;
}

namespace detail {

RegionClass classify_region(const BathParams& p, cplx omega) {
  const PolePair z = poles_z(p, omega, Variant::Physical);
  const double tol = kBoundaryTol;
  const double ap = std::abs(z.z_plus), am = std::abs(z.z_minus);
  if (std::abs(ap - 1.0) < tol || std::abs(am - 1.0) < tol) return RegionClass::Loop;
  const int inside = (ap < 1.0 ? 1 : 0) + (am < 1.0 ? 1 : 0);
  return inside == 1 ? RegionClass::I : RegionClass::II;
}

}  // namespace detail

Region region_of(const BathParams& p, cplx omega) {
  switch (detail::classify_region(p, omega)) {
    case detail::RegionClass::I: return Region::I;
    case detail::RegionClass::II: return Region::II;
    default: fail(ErrorCode::OnBranchLoop, "omega on the branch loop");
  }
}

double spectral_top(const BathParams& p, Variant variant, int n_k) {
  double top = -1e300;
  for (int n = 0; n < n_k; ++n) {
    const double k = -PI + 2.0 * PI * n / n_k;
    top = std::max(top, dispersion(p, k, +1, variant).imag());
    top = std::max(top, dispersion(p, k, -1, variant).imag());
  }
  return top;
}

double distance_to_spectrum(const BathParams& p, cplx omega, Variant variant, int n_k) {
  double d = 1e300;
  for (int n = 0; n < n_k; ++n) {
    const double k = -PI + 2.0 * PI * n / n_k;
    d = std::min(d, std::abs(omega - dispersion(p, k, +1, variant)));
    d = std::min(d, std::abs(omega - dispersion(p, k, -1, variant)));
  }
  return d;
}

}  // namespace sshbath
