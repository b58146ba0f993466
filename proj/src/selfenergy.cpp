#include "sshbath/selfenergy.hpp"

#include <cmath>

namespace sshbath {

const char* pair_name(Pair pair) {
  switch (pair) {
    case Pair::AA: return "AA";
    case Pair::AB: return "AB";
    case Pair::BA: return "BA";
    case Pair::BB: return "BB";
  }
  return "?";
}

namespace detail {

cplx ipow(cplx z, int n) {
  if (n < 0) return 1.0 / ipow(z, -n);
  cplx out{1.0, 0.0};
  cplx base = z;
  for (unsigned m = (unsigned)n; m; m >>= 1) {
    if (m & 1u) out *= base;
    base *= base;
  }
  return out;
}

VariantCoeffs variant_coeffs(const BathParams& p, Variant variant) {
  p.validate();
  switch (variant) {
    case Variant::Closed:
      return {p.j1, p.j1, p.j2, 0.0};
    case Variant::Physical:
      return {p.jp(), p.jm(), p.j2, 0.5 * p.gamma_b};
    case Variant::Mirage: {
      const MirageParams m = mirage_map(p);
      return {m.j1_tilde, m.j1_tilde, p.j2, 0.5 * p.gamma_b};
    }
  }
  fail(ErrorCode::InvalidArgument, "bad variant");
}

ResidueContext residue_context(const BathParams& p, cplx omega, Variant variant,
                               int branch_sign) {
  const VariantCoeffs c = variant_coeffs(p, variant);
  const double a = -c.j2 * c.jab;
  if (std::abs(a) < 1e-300)
    fail(ErrorCode::DegenerateQuadratic, "pole quadratic has vanishing leading coefficient");
  const cplx ws = omega + I * c.shift;
  const cplx b = ws * ws - (c.jab * c.jba + c.j2 * c.j2);
  const double cc = -c.j2 * c.jba;
  cplx lam = std::sqrt(b * b - 4.0 * a * cc);
  if (branch_sign < 0) lam = -lam;
  ResidueContext rc;
  rc.ws = ws;
  rc.lambda = lam;
  rc.z_p = (-b + lam) / (2.0 * a);
  rc.z_m = (-b - lam) / (2.0 * a);
  rc.coeffs = c;
  return rc;
}

namespace {

Variant sheet_variant(Sheet sheet) {
  return sheet == Sheet::First ? Variant::Physical : Variant::Mirage;
}

Region region_tag(const BathParams& p, cplx omega) {
  const PolePair z = poles_z(p, omega, Variant::Physical);
  const int inside = (std::abs(z.z_plus) < 1.0 ? 1 : 0) + (std::abs(z.z_minus) < 1.0 ? 1 : 0);
  return inside == 1 ? Region::I : Region::II;
}

double mirage_prefactor(const BathParams& p, int d, Pair pair) {
  const double r = mirage_map(p).r;
  switch (pair) {
    case Pair::AB: return std::pow(r, -(d + 1));
    case Pair::BA: return std::pow(r, d + 1);
    default: return std::pow(r, d);
  }
}

}  // namespace

cplx sigma_onsite_raw(const BathParams& p, double omega_rabi, cplx omega, Sheet sheet,
                      int branch_sign) {
  const ResidueContext rc = residue_context(p, omega, sheet_variant(sheet), branch_sign);
  const double o2 = omega_rabi * omega_rabi;
  return residue_sum([&](cplx) { return o2 * rc.ws; }, 0, rc);
}

cplx sigma_cross_raw(const BathParams& p, double omega_rabi, cplx omega, int d, Pair pair,
                     Sheet sheet, int branch_sign) {
  const Variant v = sheet_variant(sheet);
  const ResidueContext rc = residue_context(p, omega, v, branch_sign);
  const VariantCoeffs& c = rc.coeffs;
  const double o2 = omega_rabi * omega_rabi;
  const double pref = sheet == Sheet::Second ? mirage_prefactor(p, d, pair) : 1.0;

  cplx value;
  switch (pair) {
    case Pair::AA:
    case Pair::BB:
      value = residue_sum([&](cplx z) { return rc.ws * ipow(z, d); }, d, rc);
      break;
    case Pair::AB:
      value = residue_sum([&](cplx z) { return (c.jab + c.j2 / z) * ipow(z, -d); }, -d - 1, rc);
      break;
    case Pair::BA:
      value = residue_sum([&](cplx z) { return (c.jba + c.j2 * z) * ipow(z, d); }, d, rc);
      break;
  }
  return o2 * pref * value;
}

}  // namespace detail

PolePair poles_z(const BathParams& p, cplx omega, Variant variant) {
  const detail::ResidueContext rc = detail::residue_context(p, omega, variant, +1);
  return {rc.z_p, rc.z_m};
}

cplx discriminant(const BathParams& p, cplx omega, Variant variant) {
  return detail::residue_context(p, omega, variant, +1).lambda;
}

SelfEnergyValue sigma_onsite(const BathParams& p, double omega_rabi, cplx omega, Sheet sheet) {
  SelfEnergyValue out;
  out.sheet = sheet;
  out.value = detail::sigma_onsite_raw(p, omega_rabi, omega, sheet, +1);
  out.region = detail::region_tag(p, omega);
  return out;
}

SelfEnergyValue sigma_cross(const BathParams& p, double omega_rabi, cplx omega, int d, Pair pair,
                            Sheet sheet) {
  SelfEnergyValue out;
  out.sheet = sheet;
  out.value = detail::sigma_cross_raw(p, omega_rabi, omega, d, pair, sheet, +1);
  out.region = detail::region_tag(p, omega);
  return out;
}

cplx sigma_quadrature_oracle(const BathParams& p, double omega_rabi, cplx omega, int d, Pair pair,
                             Variant variant, int n_k) {
  if (n_k < 16) fail(ErrorCode::InvalidArgument, "n_k must be >= 16");
  const detail::VariantCoeffs c = detail::variant_coeffs(p, variant);
  const cplx ws = omega + I * c.shift;

  const double pref = variant == Variant::Mirage ? detail::mirage_prefactor(p, d, pair) : 1.0;

  cplx sum = 0.0;
  double min_dist = 1e300;
  for (int n = 0; n < n_k; ++n) {
    const double k = -PI + 2.0 * PI * n / n_k;
    const cplx e_p = std::exp(I * k);
    const cplx e_m = std::conj(e_p);
    const cplx fa = c.jab + c.j2 * e_m;  // (omega - w+)(omega - w-) = ws^2 - fa*fb
    const cplx fb = c.jba + c.j2 * e_p;
    const cplx den = ws * ws - fa * fb;
    const cplx band = std::sqrt(fa * fb);
    min_dist = std::min(min_dist, std::min(std::abs(ws - band), std::abs(ws + band)));
    cplx num;
    switch (pair) {
      case Pair::AA:
      case Pair::BB: num = ws * detail::ipow(e_p, d); break;
      case Pair::AB: num = fa * detail::ipow(e_m, d); break;
      case Pair::BA: num = fb * detail::ipow(e_p, d); break;
    }
    sum += num / den;
  }
  if (min_dist < 1e-4)
    fail(ErrorCode::NearSpectrum, "omega too close to the bath bands for quadrature");
  return omega_rabi * omega_rabi * pref * sum / (double)n_k;
}

cplx interaction_single_pole(const BathParams& p, double omega_rabi, cplx delta_prime, int d,
                             Pair pair, Sheet sheet) {
  p.validate();
  if (std::abs(delta_prime + 0.5 * I * p.gamma_b) > 1e-10 * p.j2)
    fail(ErrorCode::NotMidgap, "single-pole forms require delta' = -i*gamma_b/2");
  if (pair == Pair::AA || pair == Pair::BB) return {0.0, 0.0};

  const double o2 = omega_rabi * omega_rabi;
  const double coupling = pair == Pair::AB ? p.jm() : p.jp();
  const double boundary = sheet == Sheet::Second ? mirage_map(p).j1_tilde : std::abs(coupling);
  if (std::abs(boundary - p.j2) < kBoundaryTol * p.j2)
    fail(ErrorCode::OnPhaseBoundary, "single-pole expression at a regime edge");

  if (boundary > p.j2) {
    if (d < 0) return {0.0, 0.0};
    return -(o2 / coupling) * std::pow(-p.j2 / coupling, d);
  }
  if (d >= 0) return {0.0, 0.0};
  return (o2 / coupling) * std::pow(-coupling / p.j2, -d);
}

}  // namespace sshbath
