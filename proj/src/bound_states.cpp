#include "sshbath/bound_states.hpp"

#include <algorithm>
#include <cmath>

#include "sshbath/selfenergy.hpp"

namespace sshbath {

void EmitterSpec::validate() const {
  if (!(omega_rabi > 0.0)) fail(ErrorCode::InvalidArgument, "omega_rabi must be > 0");
  if (gamma_a < 0.0) fail(ErrorCode::InvalidArgument, "gamma_a must be >= 0");
}

namespace {

Variant sheet_variant(Sheet sheet) {
  return sheet == Sheet::First ? Variant::Physical : Variant::Mirage;
}

// Residual of the pole equation; large sentinel when the self-energy is not
// evaluable at this omega (branch loop crossings during iteration).
cplx pole_residual(const BathParams& p, const EmitterSpec& em, Sheet sheet, cplx omega,
                   bool* ok = nullptr) {
  if (ok) *ok = true;
  try {
    const cplx sig = detail::sigma_onsite_raw(p, em.omega_rabi, omega, sheet, +1);
    return omega - em.delta_prime() - sig;
  } catch (const Error&) {
    if (ok) *ok = false;
    return cplx{1e12, 0.0};
  }
}

bool newton_from(const BathParams& p, const EmitterSpec& em, Sheet sheet, cplx seed, cplx* root) {
  const double eps = 1e-6 * p.j2;
  cplx w = seed;
  for (int it = 0; it < 100; ++it) {
    bool ok = false;
    const cplx h = pole_residual(p, em, sheet, w, &ok);
    if (!ok) {
      w += cplx{3.1 * eps, 1.7 * eps};  // nudge off the branch locus
      continue;
    }
    if (std::abs(h) < 1e-13) {
      *root = w;
      return true;
    }
    const cplx hp = pole_residual(p, em, sheet, w + eps);
    const cplx hm = pole_residual(p, em, sheet, w - eps);
    const cplx dh = (hp - hm) / (2.0 * eps);
    if (std::abs(dh) < 1e-14) return false;
    const cplx step = h / dh;
    w -= step;
    // near band edges roundoff in Lambda' floors the residual around 1e-12
    // while the root itself is converged to machine precision
    if (std::abs(step) < 4e-16 * (1.0 + std::abs(w)) && std::abs(h) < 1e-11) {
      *root = w;
      return true;
    }
  }
  bool ok = false;
  const cplx h = pole_residual(p, em, sheet, w, &ok);
  if (ok && std::abs(h) < 1e-12) {
    *root = w;
    return true;
  }
  return false;
}

std::vector<cplx> grid_seeds(const BathParams& p, const EmitterSpec& em, Sheet sheet) {
  const cplx center = em.delta_prime();
  const double half = p.j1 + p.j2 + p.gamma_b + std::abs(em.delta) + 0.5;
  constexpr int kGrid = 41;
  double score[kGrid][kGrid];
  cplx pts[kGrid][kGrid];
  for (int ix = 0; ix < kGrid; ++ix) {
    for (int iy = 0; iy < kGrid; ++iy) {
      const cplx w = center + cplx{half * (ix - 20) / 20.0, half * (iy - 20) / 20.0};
      bool ok = false;
      const cplx h = pole_residual(p, em, sheet, w, &ok);
      score[ix][iy] = ok ? std::abs(h) : 1e30;
      pts[ix][iy] = w;
    }
  }
  // every local minimum of |h| on the grid is a candidate root basin
  std::vector<cplx> seeds;
  for (int ix = 0; ix < kGrid; ++ix) {
    for (int iy = 0; iy < kGrid; ++iy) {
      if (score[ix][iy] >= 1e30) continue;
      bool is_min = true;
      for (int dx = -1; dx <= 1 && is_min; ++dx) {
        for (int dy = -1; dy <= 1 && is_min; ++dy) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jx >= kGrid || jy < 0 || jy >= kGrid || (dx == 0 && dy == 0)) continue;
          if (score[jx][jy] < score[ix][iy]) is_min = false;
        }
      }
      if (is_min) seeds.push_back(pts[ix][iy]);
    }
  }

  // band-edge roots sit in narrow basins the coarse grid misses: add
  // log-spaced seeds just outside the branch points ws^2 = sigma1 +- 2 j2 jt
  const detail::VariantCoeffs c = detail::variant_coeffs(p, sheet_variant(sheet));
  const double sigma1 = c.jab * c.jba + c.j2 * c.j2;
  const double jt = std::sqrt(std::abs(c.jab * c.jba));
  for (double s : {sigma1 + 2.0 * c.j2 * jt, sigma1 - 2.0 * c.j2 * jt}) {
    if (s <= 0.0) continue;
    const double edge = std::sqrt(s);
    for (double off = 1e-7; off < 0.2; off *= 4.0) {
      for (double dir : {1.0, -1.0}) {
        const cplx ws_seed = dir * (edge + off);
        seeds.push_back(ws_seed - I * c.shift);
      }
    }
  }
  return seeds;
}

void check_root_location(const BathParams& p, Sheet sheet, cplx root) {
  if (distance_to_spectrum(p, root, sheet_variant(sheet)) < 1e-8)
    fail(ErrorCode::RootOnSpectrum, "bound-state root lands on the bath spectrum");
}

}  // namespace

ComplexFreq bs_energy(const BathParams& p, const EmitterSpec& emitter, Sheet sheet) {
  p.validate();
  emitter.validate();
  cplx root;
  if (!newton_from(p, emitter, sheet, emitter.delta_prime(), &root)) {
    bool found = false;
    for (const cplx seed : grid_seeds(p, emitter, sheet)) {
      if (newton_from(p, emitter, sheet, seed, &root)) {
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::NoConvergence, "pole equation Newton iteration did not converge");
  }
  check_root_location(p, sheet, root);
  return {root, sheet};
}

std::vector<cplx> bs_energy_all(const BathParams& p, const EmitterSpec& emitter, Sheet sheet) {
  p.validate();
  emitter.validate();
  std::vector<cplx> roots;
  for (const cplx seed : grid_seeds(p, emitter, sheet)) {
    cplx root;
    if (!newton_from(p, emitter, sheet, seed, &root)) continue;
    if (distance_to_spectrum(p, root, sheet_variant(sheet)) < 1e-8) continue;
    bool dup = false;
    for (const cplx r : roots) {
      if (std::abs(r - root) < 1e-8) {
        dup = true;
        break;
      }
    }
    if (!dup) roots.push_back(root);
  }
  const cplx dp = emitter.delta_prime();
  std::sort(roots.begin(), roots.end(),
            [&](cplx a, cplx b) { return std::abs(a - dp) < std::abs(b - dp); });
  return roots;
}

namespace {

int auto_half_window(const detail::ResidueContext& rc) {
  double rho = 0.0;
  for (const cplx z : {rc.z_p, rc.z_m}) {
    const double m = std::abs(z);
    rho = std::max(rho, std::min(m, 1.0 / m));
  }
  if (rho >= 1.0 - 1e-12) return 2000;
  // size for truncated tail mass ~ rho^{2 half} / (1 - rho) below 1e-12
  const double needed = -std::log(1e-16 * (1.0 - rho)) / (2.0 * -std::log(rho));
  return std::clamp((int)std::ceil(needed) + 2, 20, 2000);
}

BoundState assemble_and_normalize(cplx omega_bs, Sheet sheet, int half,
                                  const std::vector<cplx>& fa, const std::vector<cplx>& fb,
                                  bool check_tail) {
  BoundState bs;
  bs.omega_bs = {omega_bs, sheet};
  bs.window_lo = -half;
  bs.window_hi = half;
  bs.f_a = fa;
  bs.f_b = fb;
  bs.phi_a = 1.0;

  double nrm2 = 1.0;
  for (const cplx v : bs.f_a) nrm2 += std::norm(v);
  for (const cplx v : bs.f_b) nrm2 += std::norm(v);
  const double nrm = std::sqrt(nrm2);

  if (check_tail) {
    double edge2 = std::norm(bs.f_a.front()) + std::norm(bs.f_a.back()) +
                   std::norm(bs.f_b.front()) + std::norm(bs.f_b.back());
    // crude geometric tail bound with ratio ~ decay over the last few cells
    double inner2 = std::norm(bs.fa(-half + 2)) + std::norm(bs.fa(half - 2)) +
                    std::norm(bs.fb(-half + 2)) + std::norm(bs.fb(half - 2));
    double rho2 = inner2 > 0.0 ? std::min(0.999, edge2 / inner2) : 0.0;
    const double tail = edge2 / std::max(1e-300, 1.0 - std::sqrt(rho2));
    if (tail > 1e-12 * nrm2)
      fail(ErrorCode::WindowTooSmall, "truncated tail mass above 1e-12 of the norm");
  }

  for (cplx& v : bs.f_a) v /= nrm;
  for (cplx& v : bs.f_b) v /= nrm;
  bs.phi_a /= nrm;
  return bs;
}

}  // namespace

BoundState bs_wavefunction(const BathParams& p, const EmitterSpec& emitter, Sheet sheet,
                           int half_window) {
  const ComplexFreq wbs = bs_energy(p, emitter, sheet);
  const detail::ResidueContext rc =
      detail::residue_context(p, wbs.value, sheet_variant(sheet), +1);
  const detail::VariantCoeffs& c = rc.coeffs;
  const double omg = emitter.omega_rabi;

  const int half = half_window > 0 ? half_window : auto_half_window(rc);
  std::vector<cplx> fa((size_t)(2 * half + 1));
  std::vector<cplx> fb((size_t)(2 * half + 1));

  for (int j = -half; j <= half; ++j) {
    cplx va, vb;
    if (emitter.sublattice == Sublattice::A) {
      va = residue_sum([&](cplx z) { return rc.ws * detail::ipow(z, j); }, j, rc);
      vb = residue_sum([&](cplx z) { return (c.jba + c.j2 * z) * detail::ipow(z, j); }, j, rc);
    } else {
      va = residue_sum([&](cplx z) { return (c.jab + c.j2 / z) * detail::ipow(z, j); }, j - 1, rc);
      vb = residue_sum([&](cplx z) { return rc.ws * detail::ipow(z, j); }, j, rc);
    }
    fa[(size_t)(j + half)] = omg * va;
    fb[(size_t)(j + half)] = omg * vb;
  }
  return assemble_and_normalize(wbs.value, sheet, half, fa, fb, true);
}

BoundState bs_midgap_closed_form(const BathParams& p, Sublattice sublattice, Sheet sheet,
                                 double omega_rabi, int half_window) {
  p.validate();
  const cplx wbs = -0.5 * I * p.gamma_b;
  double q;  // localization coupling of the table row
  if (sheet == Sheet::Second) {
    q = mirage_map(p).j1_tilde;
  } else {
    q = sublattice == Sublattice::A ? p.jp() : p.jm();
  }
  if (std::abs(std::abs(q) - p.j2) < kBoundaryTol * p.j2)
    fail(ErrorCode::OnPhaseBoundary, "midgap closed form at a chirality flip");

  const double rho = std::min(std::abs(q), p.j2) / std::max(std::abs(q), p.j2);
  const double needed = -std::log(1e-16 * (1.0 - rho)) / (2.0 * -std::log(rho));
  int half = half_window > 0 ? half_window : std::clamp((int)std::ceil(needed) + 2, 20, 2000);

  std::vector<cplx> fa((size_t)(2 * half + 1), cplx{0.0, 0.0});
  std::vector<cplx> fb((size_t)(2 * half + 1), cplx{0.0, 0.0});
  auto& f = sublattice == Sublattice::A ? fb : fa;
  const int side = sublattice == Sublattice::A ? +1 : -1;  // support side when |q| > j2

  for (int j = -half; j <= half; ++j) {
    cplx v{0.0, 0.0};
    if (std::abs(q) > p.j2) {
      if (side * j >= 0) v = -(omega_rabi / q) * std::pow(-p.j2 / q, std::abs(j));
    } else {
      if (side * j < 0) v = (omega_rabi / q) * std::pow(-q / p.j2, std::abs(j));
    }
    f[(size_t)(j + half)] = v;
  }
  return assemble_and_normalize(wbs, sheet, half, fa, fb, false);
}

BoundState obc_dark_state(const BathParams& p, double omega_rabi, Sublattice sublattice,
                          int half_window) {
  p.validate();
  if (!(omega_rabi > 0.0)) fail(ErrorCode::InvalidArgument, "omega_rabi must be > 0");
  const cplx wbs = -0.5 * I * p.gamma_b;
  const int half = half_window;
  std::vector<cplx> fa((size_t)(2 * half + 1), cplx{0.0, 0.0});
  std::vector<cplx> fb((size_t)(2 * half + 1), cplx{0.0, 0.0});

  if (sublattice == Sublattice::A) {
    const double jp = p.jp();
    if (std::abs(jp) < 1e-14) fail(ErrorCode::InvalidArgument, "j1 + gamma_b/2 must not vanish");
    for (int j = 0; j <= half; ++j)
      fb[(size_t)(j + half)] = -(omega_rabi / jp) * std::pow(-p.j2 / jp, j);
  } else {
    const double jm = p.jm();
    if (std::abs(jm) < 1e-14) fail(ErrorCode::InvalidArgument, "j1 - gamma_b/2 must not vanish");
    for (int j = -half; j <= 0; ++j)
      fa[(size_t)(j + half)] = -(omega_rabi / jm) * std::pow(-p.j2 / jm, -j);
  }
  return assemble_and_normalize(wbs, Sheet::First, half, fa, fb, false);
}

}  // namespace sshbath
