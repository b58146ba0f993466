// multi_excitation.hpp — two-excitation observables of one driven nonlinear
// emitter: the pair function Pi, the two-particle Green function D, the
// spontaneous pair emission D(t), and the steady-state g2 correlation.
//
// All frequency convolutions run on the second (mirage) Riemann sheet, whose
// branch structure in the two-particle plane stays one-dimensional. The
// convolution contour is a horizontal line midway between the singularities
// of G(w') and of G(w - w'); the exactly convolvable two-pole rational
// reference of each Green factor is subtracted so the remaining quadrature
// integrand decays like 1/w'^6 and the stated spans converge below 1e-9.

#pragma once

#include "sshbath/bound_states.hpp"
#include "sshbath/dynamics.hpp"
#include "sshbath/timeseries.hpp"

namespace sshbath {

struct NonlinearEmitterSpec {
  EmitterSpec base;
  double u{0.0};           // Kerr interaction strength
  double drive_eps{0.0};   // pump amplitude (weak-drive formulas: bookkeeping only)
  double drive_omega{0.0}; // pump frequency
};

struct PairQuadrature {
  double span{0.0};        // half-width; <= 0 means 16*(j1+j2+gamma_b+|delta|+|u|)
  int n{1 << 13};          // quadrature points
  double u_scale{0.0};     // |u| entering the auto span
};

struct PairFunctionValue {
  cplx omega;
  cplx pi;
};

// Pi(omega) = i Int dw'/2pi G(w') G(omega - w').
PairFunctionValue pi_function(const BathParams& p, const EmitterSpec& emitter, cplx omega,
                              Sheet sheet, const PairQuadrature& quad = {});

// D(omega) = 1 / (Pi^{-1}(omega) - u).
cplx two_particle_green(const BathParams& p, const EmitterSpec& emitter, cplx omega, double u,
                        Sheet sheet, const PairQuadrature& quad = {});

// Spontaneous two-excitation emission D(t), labeled "D".
TimeSeries pair_emission_dynamics(const BathParams& p, const NonlinearEmitterSpec& emitter,
                                  const std::vector<double>& t_grid,
                                  const ContourSpec& contour = {},
                                  const PairQuadrature& quad = {});

// Steady-state second-order correlation of the weakly driven emitter.
double g2(const BathParams& p, const NonlinearEmitterSpec& emitter, double tau,
          const PairQuadrature& quad = {});

}  // namespace sshbath
