// dynamics.hpp — exact real-time emitter dynamics by Fourier transform of the
// multi-emitter Green matrix along a horizontal contour, and the emitterless
// bath correlation propagator.
//
// The closed integration contours of the resolvent formalism are realized as
// one straight line Im(omega) = eta above every pole and branch singularity;
// for t >= 0 the line is homotopic to them and picks up all of them at once.
// The free (rational two-pole) part of each diagonal Green element is
// subtracted and transformed analytically, so the sampled remainder decays
// like 1/omega^5 and the window truncation error stays below ~1e-8 at the
// default spans.
//
//   G(t) = e^{eta t} / (2 pi) * Int dx e^{-i x t} [G(x + i eta) - ref] + ref(t)
//
// with the trapezoid rule on a uniform x grid.

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sshbath/bound_states.hpp"
#include "sshbath/selfenergy.hpp"
#include "sshbath/timeseries.hpp"

namespace sshbath {

struct ContourSpec {
  double eta{0.0};          // height of the line; 0 means auto placement
  double span{0.0};         // half-width W; <= 0 means auto
  int n_omega{1 << 16};     // sample count
  double eta_margin{0.05};  // auto: eta = top singularity + eta_margin * j2
  double span_factor{8.0};  // auto: span = span_factor * (j1 + j2 + gamma_b + max|delta|)
  bool check_aliasing{false};  // re-run at half resolution and compare

  static ContourSpec defaults() { return {}; }
};

// Resolvent matrix G(omega) = (omega - diag(delta') - Sigma(omega))^{-1} with
// the self-energy matrix assembled from the emitter geometry.
Eigen::MatrixXcd green_matrix(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                              cplx omega, Sheet sheet);

// Self-energy matrix alone (element (m,n) couples emitter n to emitter m).
Eigen::MatrixXcd sigma_matrix(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                              cplx omega, Sheet sheet);

// Column `initial` of the time-domain Green matrix; series labeled
// "emitter:<m>". |values[initial](0)| = 1, off-diagonal values vanish at t=0.
TimeSeries evolve_emitters(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                           const std::vector<double>& t_grid, Sheet sheet,
                           const ContourSpec& contour, int initial);

// Bath correlation -i<0| b_{s j}(t) b_{s' j'}^dag(0) |0> for t >= 0.
using BathSite = std::pair<Sublattice, int>;
std::vector<cplx> bath_correlation_series(const BathParams& p, const std::vector<double>& t_grid,
                                          BathSite site, BathSite site2, Sheet sheet,
                                          const ContourSpec& contour = {});
cplx bath_correlation(const BathParams& p, double t, BathSite site, BathSite site2, Sheet sheet,
                      const ContourSpec& contour = {});

// Dominant oscillation frequency of e^{gamma_b t} |series|^2 from the spacing
// of its interior peaks.
double rabi_frequency_estimate(const TimeSeries& series, const std::string& label,
                               double gamma_b);

namespace detail {

// Two-pole rational reference for one emitter's diagonal Green element:
// poles and residues of (w - d')(w + i g/2) = Omega^2.
struct RationalRef {
  cplx p1, p2;  // poles
  cplx r1, r2;  // residues
  cplx eval(cplx w) const { return r1 / (w - p1) + r2 / (w - p2); }
  cplx eval_t(double t) const {  // its exact transform for t >= 0
    return -I * (r1 * std::exp(-I * p1 * t) + r2 * std::exp(-I * p2 * t));
  }
};
RationalRef rational_ref(const BathParams& p, cplx delta_prime, double omega_rabi);

// Shared line-transform helper: given samples F_k on x_k = -W + k dx (line
// Im = eta), evaluates e^{eta t} (dx / 2 pi) sum_k w_k e^{-i x_k t} F_k.
std::vector<cplx> line_transform(const std::vector<cplx>& samples, double span, double eta,
                                 const std::vector<double>& t_grid);

double contour_eta(const BathParams& p, const std::vector<EmitterSpec>& emitters, Sheet sheet,
                   const ContourSpec& spec);
double contour_span(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                    const ContourSpec& spec);

}  // namespace detail

}  // namespace sshbath
