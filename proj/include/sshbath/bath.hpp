// bath.hpp — SSH bath parameters, dispersions, phase and region classification
//
// Conventions: all couplings and frequencies are in units of J2, the inter-cell
// coupling. Quasi-momentum k lives on [-pi, pi). The three bath flavours are
//   Closed   — Hermitian SSH chain (no dissipation),
//   Physical — nonreciprocal SSH with intra-cell dissipative coupling gamma_b,
//   Mirage   — the analytic continuation of the physical bath onto the second
//              Riemann sheet: symmetric hopping sqrt(J1^2 - gamma_b^2/4) plus a
//              uniform -i*gamma_b/2 on-site shift.

#pragma once

#include <vector>

#include "sshbath/common.hpp"

namespace sshbath {

struct BathParams {
  double j1{1.0};       // intra-cell coupling, >= 0
  double j2{1.0};       // inter-cell coupling, > 0 (sets the unit)
  double gamma_b{0.0};  // bath dissipation rate, >= 0

  void validate() const;
  double jp() const { return j1 + 0.5 * gamma_b; }  // forward intra-cell hop
  double jm() const { return j1 - 0.5 * gamma_b; }  // backward intra-cell hop
};

struct MirageParams {
  double j1_tilde{0.0};  // sqrt(j1^2 - gamma_b^2/4)
  double r{1.0};         // contour radius sqrt((j1 - gamma_b/2)/(j1 + gamma_b/2))
};

enum class Phase {
  TopologicalLineGap,
  PointGap,
  TrivialLineGap,
  Topological,  // mirage / closed labels
  Trivial,
};

enum class Region { I, II };

struct GapBoundaries {
  double physical_lower;  // j2 - gamma_b/2
  double physical_upper;  // j2 + gamma_b/2
  double mirage;          // sqrt(j2^2 + gamma_b^2/4)
};

// Band = +1 or -1 selects the upper/lower band.
cplx dispersion(const BathParams& p, double k, int band, Variant variant);

Phase classify_phase(const BathParams& p);
Phase classify_mirage_phase(const BathParams& p);
MirageParams mirage_map(const BathParams& p);
GapBoundaries gap_boundaries(const BathParams& p);

// Region of a complex frequency relative to the physical branch loop, decided
// by how many poles of the self-energy sit inside the unit circle: exactly one
// inside -> I, zero or two -> II. Throws OnBranchLoop within tolerance.
Region region_of(const BathParams& p, cplx omega);

// Largest imaginary part of the bath spectrum for the given variant, from a
// dense k scan. Used to place integration contours.
double spectral_top(const BathParams& p, Variant variant, int n_k = 2048);

// Smallest distance from omega to the bath bands of the given variant.
double distance_to_spectrum(const BathParams& p, cplx omega, Variant variant, int n_k = 2048);

const char* phase_name(Phase ph);

namespace detail {
// Non-throwing region classification; Loop means within tolerance of |z|=1.
enum class RegionClass { I, II, Loop };
RegionClass classify_region(const BathParams& p, cplx omega);
}  // namespace detail

}  // namespace sshbath
