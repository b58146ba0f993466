// selfenergy.hpp — closed-form bath self-energies via the residue theorem,
// plus the Brillouin-zone quadrature oracle and the midgap single-pole
// interaction strengths.
//
// Every quantity is a contour integral over z = e^{ik} with two simple poles
// z+, z- (roots of a quadratic) and a numerator of the form
//   N(z) z^m,  N in { w', jab + J2/z, jba + J2 z },  w' = omega + i*gamma_b/2.
// When the integrand is analytic at z = 0 the residue sum picks the poles
// inside the unit circle; otherwise the z -> 1/z substitution picks the poles
// outside with the opposite sign. Both cases share one kernel.
//
// Sheet::First evaluates the physical bath (closed bath when gamma_b = 0);
// Sheet::Second evaluates the mirage continuation, whose cross elements carry
// powers of the contour radius r.
//
// Cross-element distance conventions follow the two-emitter geometry with the
// A-coupled emitter at cell 0 and the B-coupled one at cell d:
//   AB      — row emitter on A, column emitter on B, d = cell(B) - cell(A)
//   BA      — row emitter on B, column emitter on A, d = cell(B) - cell(A)
//   AA / BB — d = cell(row) - cell(column)

#pragma once

#include "sshbath/bath.hpp"
#include "sshbath/common.hpp"

namespace sshbath {

struct PolePair {
  cplx z_plus;   // root attached to the + branch of the discriminant
  cplx z_minus;  // root attached to the - branch
};

enum class Pair { AA, AB, BA, BB };

struct SelfEnergyValue {
  cplx value{0.0, 0.0};
  Region region{Region::I};
  Sheet sheet{Sheet::First};
};

PolePair poles_z(const BathParams& p, cplx omega, Variant variant);

// Principal branch of the pole-quadratic discriminant; identical for the
// physical and mirage variants.
cplx discriminant(const BathParams& p, cplx omega, Variant variant);

SelfEnergyValue sigma_onsite(const BathParams& p, double omega_rabi, cplx omega, Sheet sheet);

SelfEnergyValue sigma_cross(const BathParams& p, double omega_rabi, cplx omega, int d, Pair pair,
                            Sheet sheet);

// Trapezoid evaluation of the defining k-integral on a uniform periodic grid.
// Spectrally accurate for omega off the bands of the given variant.
cplx sigma_quadrature_oracle(const BathParams& p, double omega_rabi, cplx omega, int d, Pair pair,
                             Variant variant, int n_k = 4096);

// Midgap (delta' = -i*gamma_b/2) single-pole interaction strengths.
cplx interaction_single_pole(const BathParams& p, double omega_rabi, cplx delta_prime, int d,
                             Pair pair, Sheet sheet);

const char* pair_name(Pair pair);

namespace detail {

// Exact integer power by repeated multiplication.
cplx ipow(cplx z, int n);

struct VariantCoeffs {
  double jab;    // coefficient in the AB numerator (jp / j1 / j1_tilde)
  double jba;    // coefficient in the BA numerator (jm / j1 / j1_tilde)
  double j2;
  double shift;  // w' = omega + i*shift
};
VariantCoeffs variant_coeffs(const BathParams& p, Variant variant);

// Shared residue machinery: poles, signed discriminant and the shifted
// frequency for one (params, omega, variant) evaluation.
struct ResidueContext {
  cplx z_p, z_m;  // roots ordered by the chosen discriminant branch
  cplx lambda;    // signed discriminant, equals a*(z_p - z_m)
  cplx ws;        // omega + i*shift
  VariantCoeffs coeffs;
};
ResidueContext residue_context(const BathParams& p, cplx omega, Variant variant,
                               int branch_sign = +1);

inline double theta_inside(cplx z) {
  const double m = std::abs(z);
  if (std::abs(m - 1.0) < kBoundaryTol)
    fail(ErrorCode::OnBranchLoop, "pole within tolerance of the unit circle");
  return m < 1.0 ? 1.0 : 0.0;
}

// Residue sum of dz/(2 pi i) N(z) z^m / (a (z-z_p)(z-z_m)); min_power is the
// lowest power of z in N(z) z^m and decides which poles contribute.
template <class F>
cplx residue_sum(const F& numer, int min_power, const ResidueContext& rc) {
  if (std::abs(rc.lambda) < 1e-12 * (1.0 + std::norm(rc.ws)))
    fail(ErrorCode::OnBranchLoop, "omega at a branch point (band edge)");
  const double tp = theta_inside(rc.z_p);
  const double tm = theta_inside(rc.z_m);
  if (min_power >= 0) {
    if (tp == 0.0 && tm == 0.0) return {0.0, 0.0};
    return (numer(rc.z_p) * tp - numer(rc.z_m) * tm) / rc.lambda;
  }
  // pole at the origin: pick up the poles outside the unit circle instead
  const double up = 1.0 - tp;
  const double um = 1.0 - tm;
  if (up == 0.0 && um == 0.0) return {0.0, 0.0};
  return (numer(rc.z_m) * um - numer(rc.z_p) * up) / rc.lambda;
}

// branch_sign = -1 flips the discriminant branch (swaps z+ and z-); the
// physical values are invariant under the flip.
cplx sigma_onsite_raw(const BathParams& p, double omega_rabi, cplx omega, Sheet sheet,
                      int branch_sign);
cplx sigma_cross_raw(const BathParams& p, double omega_rabi, cplx omega, int d, Pair pair,
                     Sheet sheet, int branch_sign);

}  // namespace detail

}  // namespace sshbath
