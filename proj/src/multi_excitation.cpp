#include "sshbath/multi_excitation.hpp"

#include <algorithm>
#include <cmath>

namespace sshbath {

namespace {

Variant sheet_variant(Sheet sheet) {
  return sheet == Sheet::First ? Variant::Physical : Variant::Mirage;
}

cplx green_scalar(const BathParams& p, const EmitterSpec& em, cplx omega, Sheet sheet) {
  const cplx sig = detail::sigma_onsite_raw(p, em.omega_rabi, omega, sheet, +1);
  return 1.0 / (omega - em.delta_prime() - sig);
}

// Upper envelope of the singularities of G on the chosen sheet: band top,
// effective detuning, bound-state poles and the rational-reference poles.
double green_top(const BathParams& p, const EmitterSpec& em, Sheet sheet) {
  double top = spectral_top(p, sheet_variant(sheet));
  top = std::max(top, em.delta_prime().imag());
  const detail::RationalRef ref = detail::rational_ref(p, em.delta_prime(), em.omega_rabi);
  top = std::max({top, ref.p1.imag(), ref.p2.imag()});
  try {
    top = std::max(top, bs_energy(p, em, sheet).value.imag());
  } catch (const Error&) {
    // no isolated root found near delta'; band top already covers the cut
  }
  return top;
}

// Precomputed state for repeated Pi evaluations with one (params, emitter).
struct PiEvaluator {
  const BathParams& p;
  EmitterSpec em;
  Sheet sheet;
  double s_up;
  detail::RationalRef ref;
  double span;
  int n;

  PiEvaluator(const BathParams& params, const EmitterSpec& emitter, Sheet sh,
              const PairQuadrature& quad)
      : p(params), em(emitter), sheet(sh) {
    em.validate();
    s_up = green_top(p, em, sheet);
    ref = detail::rational_ref(p, em.delta_prime(), em.omega_rabi);
    span = quad.span > 0.0
               ? quad.span
               : 16.0 * (p.j1 + p.j2 + p.gamma_b + std::abs(em.delta) + std::abs(quad.u_scale));
    n = quad.n;
  }

  cplx eval(cplx omega) const {
    if (!(omega.imag() > 2.0 * s_up + 1e-9))
      fail(ErrorCode::ContourPinched, "omega not above the two-particle singularities");

    // exact convolution of the rational references: close downward around p1, p2
    const cplx pi_rat = ref.r1 * ref.eval(omega - ref.p1) + ref.r2 * ref.eval(omega - ref.p2);

    // integrate w' = omega/2 + x along the line Im w' = Im(omega)/2, which
    // lies midway between the two singularity envelopes; the x window covers
    // the spectral humps of both factors symmetrically
    const double half_width = span + 0.5 * std::abs(omega.real());
    const int n_eff = (int)std::ceil(n * half_width / span);
    const double dx = 2.0 * half_width / (n_eff - 1);
    cplx acc{0.0, 0.0};
    for (int k = 0; k < n_eff; ++k) {
      const cplx w1 = 0.5 * omega + cplx{-half_width + k * dx, 0.0};
      const cplx w2 = omega - w1;
      const cplx g1 = green_scalar(p, em, w1, sheet);
      const cplx g2v = green_scalar(p, em, w2, sheet);
      const cplx corr = g1 * g2v - ref.eval(w1) * ref.eval(w2);
      acc += ((k == 0 || k == n_eff - 1) ? 0.5 : 1.0) * corr;
    }
    return pi_rat + I * dx / (2.0 * PI) * acc;
  }
};

}  // namespace

PairFunctionValue pi_function(const BathParams& p, const EmitterSpec& emitter, cplx omega,
                              Sheet sheet, const PairQuadrature& quad) {
  p.validate();
  const PiEvaluator ev(p, emitter, sheet, quad);
  return {omega, ev.eval(omega)};
}

cplx two_particle_green(const BathParams& p, const EmitterSpec& emitter, cplx omega, double u,
                        Sheet sheet, const PairQuadrature& quad) {
  const cplx pi = pi_function(p, emitter, omega, sheet, quad).pi;
  if (std::abs(pi) < 1e-150) fail(ErrorCode::PiZero, "pair function vanishes at omega");
  return 1.0 / (1.0 / pi - u);
}

TimeSeries pair_emission_dynamics(const BathParams& p, const NonlinearEmitterSpec& emitter,
                                  const std::vector<double>& t_grid, const ContourSpec& contour,
                                  const PairQuadrature& quad) {
  p.validate();
  if (t_grid.empty() || t_grid.front() < 0.0)
    fail(ErrorCode::InvalidArgument, "time grid must start at t >= 0");

  const Sheet sheet = Sheet::Second;  // mirage route
  PairQuadrature inner = quad;
  inner.u_scale = emitter.u;
  const PiEvaluator ev(p, emitter.base, sheet, inner);

  const double eta2 = contour.eta > 0.0
                          ? contour.eta
                          : 2.0 * std::max(ev.s_up, 0.0) + contour.eta_margin * p.j2;
  if (!(eta2 > 2.0 * ev.s_up))
    fail(ErrorCode::ContourTooLow, "pair contour does not clear the two-particle spectrum");

  double span2 = contour.span;
  if (span2 <= 0.0)
    span2 = contour.span_factor *
            (2.0 * (p.j1 + p.j2 + p.gamma_b + std::abs(emitter.base.delta)) +
             std::abs(emitter.u));
  const int n2 = contour.n_omega == ContourSpec{}.n_omega ? (1 << 13)
                                                          : std::max(contour.n_omega, 1 << 8);

  // reference 1/(w - 2 delta' - u): exact transform -i e^{-i (2 delta' + u) t}
  const cplx pair_pole = 2.0 * emitter.base.delta_prime() + emitter.u;
  if (pair_pole.imag() >= eta2)
    fail(ErrorCode::ContourTooLow, "pair reference pole above the contour");

  const double dx = 2.0 * span2 / (n2 - 1);
  std::vector<cplx> samples((size_t)n2);
  for (int k = 0; k < n2; ++k) {
    const cplx w = cplx{-span2 + k * dx, eta2};
    const cplx pi = ev.eval(w);
    const cplx d = std::abs(pi) < 1e-150 ? cplx{0.0, 0.0} : 1.0 / (1.0 / pi - emitter.u);
    samples[(size_t)k] = d - 1.0 / (w - pair_pole);
  }

  TimeSeries ts;
  ts.times = t_grid;
  std::vector<cplx> series = detail::line_transform(samples, span2, eta2, t_grid);
  for (size_t g = 0; g < t_grid.size(); ++g)
    series[g] += -I * std::exp(-I * pair_pole * t_grid[g]);
  ts.values["D"] = std::move(series);
  return ts;
}

double g2(const BathParams& p, const NonlinearEmitterSpec& emitter, double tau,
          const PairQuadrature& quad) {
  p.validate();
  if (tau < 0.0) fail(ErrorCode::InvalidArgument, "tau must be >= 0");

  const Sheet sheet = Sheet::Second;
  const double wd = emitter.drive_omega;
  PairQuadrature inner = quad;
  inner.u_scale = emitter.u;
  const PiEvaluator ev(p, emitter.base, sheet, inner);

  if (!(ev.s_up < -1e-12))
    fail(ErrorCode::ContourPinched, "steady-state g2 needs a dissipative spectrum");

  const cplx pi2 = ev.eval(cplx{2.0 * wd, 0.0});
  const double g0 = 1.0 / std::norm(1.0 - emitter.u * pi2);
  if (tau == 0.0) return g0;
  if (emitter.u == 0.0) return 1.0;

  // Pi_bar(tau) = i Int dw'/2pi G(wd + w') G(wd - w') e^{-i w' tau} along the
  // real axis; the rational reference closes downward around p1, p2.
  const detail::RationalRef& ref = ev.ref;
  cplx pib = ref.r1 * ref.eval(2.0 * wd - ref.p1) * std::exp(-I * (ref.p1 - wd) * tau) +
             ref.r2 * ref.eval(2.0 * wd - ref.p2) * std::exp(-I * (ref.p2 - wd) * tau);

  const double span = ev.span;
  int n = ev.n;
  n = std::max(n, (int)std::ceil(span * tau / PI) * 4);  // resolve e^{-i w' tau}
  const double dx = 2.0 * span / (n - 1);
  cplx acc{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const double x = -span + k * dx;
    const cplx g1 = green_scalar(p, emitter.base, cplx{wd + x, 0.0}, sheet);
    const cplx g2v = green_scalar(p, emitter.base, cplx{wd - x, 0.0}, sheet);
    const cplx corr =
        (g1 * g2v - ref.eval(cplx{wd + x, 0.0}) * ref.eval(cplx{wd - x, 0.0})) *
        std::exp(-I * x * tau);
    acc += ((k == 0 || k == n - 1) ? 0.5 : 1.0) * corr;
  }
  pib += I * dx / (2.0 * PI) * acc;

  const cplx t_matrix = 1.0 / (1.0 / emitter.u - pi2);
  return std::norm(1.0 + pib * t_matrix);
}

}  // namespace sshbath
