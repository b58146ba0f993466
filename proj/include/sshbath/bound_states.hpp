// bound_states.hpp — bound-state energies from the pole equation and their
// real-space photon wavefunctions, on either Riemann sheet.
//
// Wavefunction amplitudes are indexed by the cell offset j relative to the
// emitter cell and normalized so that |phi_a|^2 + sum(|f_A|^2 + |f_B|^2) = 1
// over the window, with phi_a real and positive (canonical phase).

#pragma once

#include <vector>

#include "sshbath/bath.hpp"
#include "sshbath/common.hpp"

namespace sshbath {

struct EmitterSpec {
  Sublattice sublattice{Sublattice::A};
  int cell{0};
  double delta{0.0};       // detuning
  double gamma_a{0.0};     // free-space decay rate, >= 0
  double omega_rabi{0.1};  // coupling to the bath, > 0

  cplx delta_prime() const { return cplx{delta, -0.5 * gamma_a}; }
  void validate() const;
};

struct BoundState {
  ComplexFreq omega_bs;
  cplx phi_a{1.0, 0.0};
  int window_lo{0};  // inclusive cell offsets relative to the emitter
  int window_hi{0};
  std::vector<cplx> f_a;  // f_a[j - window_lo]
  std::vector<cplx> f_b;

  cplx fa(int j) const {
    return (j < window_lo || j > window_hi) ? cplx{0.0, 0.0} : f_a[(size_t)(j - window_lo)];
  }
  cplx fb(int j) const {
    return (j < window_lo || j > window_hi) ? cplx{0.0, 0.0} : f_b[(size_t)(j - window_lo)];
  }
};

// Root of omega - delta' - Sigma0(omega) nearest to delta'. Newton iteration
// seeded at delta'; the midgap case delta' = -i*gamma_b/2 is exact without
// iteration since the self-energy numerator vanishes there.
ComplexFreq bs_energy(const BathParams& p, const EmitterSpec& emitter, Sheet sheet);

// All roots located by a grid scan around delta', sorted by |omega - delta'|.
std::vector<cplx> bs_energy_all(const BathParams& p, const EmitterSpec& emitter, Sheet sheet);

// General residue-theorem wavefunction at the bound-state energy.
// half_window = 0 sizes the window automatically from the pole decay ratio.
BoundState bs_wavefunction(const BathParams& p, const EmitterSpec& emitter, Sheet sheet,
                           int half_window = 0);

// Midgap closed forms (delta' = -i*gamma_b/2), an independent code path used
// to cross-check bs_wavefunction.
BoundState bs_midgap_closed_form(const BathParams& p, Sublattice sublattice, Sheet sheet,
                                 double omega_rabi, int half_window = 0);

// Dark state of the open-boundary physical bath at energy -i*gamma_b/2.
BoundState obc_dark_state(const BathParams& p, double omega_rabi, Sublattice sublattice,
                          int half_window = 40);

}  // namespace sshbath
