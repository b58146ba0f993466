#include "sshbath/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace sshbath {

namespace {

Variant sheet_variant(Sheet sheet) {
  return sheet == Sheet::First ? Variant::Physical : Variant::Mirage;
}

// (pair, d) of the self-energy element coupling emitter n into emitter m
std::pair<Pair, int> element_geometry(const EmitterSpec& em_m, const EmitterSpec& em_n) {
  const bool ma = em_m.sublattice == Sublattice::A;
  const bool na = em_n.sublattice == Sublattice::A;
  if (ma && na) return {Pair::AA, em_m.cell - em_n.cell};
  if (!ma && !na) return {Pair::BB, em_m.cell - em_n.cell};
  if (ma && !na) return {Pair::AB, em_n.cell - em_m.cell};
  return {Pair::BA, em_m.cell - em_n.cell};
}

}  // namespace

Eigen::MatrixXcd sigma_matrix(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                              cplx omega, Sheet sheet) {
  const int na = (int)emitters.size();
  Eigen::MatrixXcd sig(na, na);
  for (int m = 0; m < na; ++m) {
    for (int n = 0; n < na; ++n) {
      const double coupling = emitters[(size_t)m].omega_rabi * emitters[(size_t)n].omega_rabi;
      if (m == n) {
        sig(m, n) = coupling * detail::sigma_onsite_raw(p, 1.0, omega, sheet, +1);
      } else {
        const auto [pair, d] = element_geometry(emitters[(size_t)m], emitters[(size_t)n]);
        sig(m, n) = coupling * detail::sigma_cross_raw(p, 1.0, omega, d, pair, sheet, +1);
      }
    }
  }
  return sig;
}

Eigen::MatrixXcd green_matrix(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                              cplx omega, Sheet sheet) {
  p.validate();
  if (emitters.empty()) fail(ErrorCode::InvalidArgument, "no emitters");
  if (emitters.size() > 64)
    fail(ErrorCode::DimensionTooLarge, "dense Green matrix limited to 64 emitters");
  for (const EmitterSpec& em : emitters) em.validate();

  const int na = (int)emitters.size();
  Eigen::MatrixXcd a = -sigma_matrix(p, emitters, omega, sheet);
  for (int m = 0; m < na; ++m) a(m, m) += omega - emitters[(size_t)m].delta_prime();

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const auto& d = lu.matrixLU().diagonal();
  double dmin = 1e300, dmax = 0.0;
  for (int i = 0; i < na; ++i) {
    dmin = std::min(dmin, std::abs(d(i)));
    dmax = std::max(dmax, std::abs(d(i)));
  }
  if (dmin < 1e-14 * std::max(1.0, dmax))
    fail(ErrorCode::SingularMatrix, "omega is a pole of the Green matrix");
  return lu.solve(Eigen::MatrixXcd::Identity(na, na));
}

namespace detail {

RationalRef rational_ref(const BathParams& p, cplx delta_prime, double omega_rabi) {
  const cplx c = -0.5 * I * p.gamma_b;  // bath pole of the large-omega self-energy
  const cplx sum = delta_prime + c;
  const cplx dif = std::sqrt((delta_prime - c) * (delta_prime - c) +
                             4.0 * omega_rabi * omega_rabi);
  RationalRef ref;
  ref.p1 = 0.5 * (sum + dif);
  ref.p2 = 0.5 * (sum - dif);
  if (std::abs(ref.p1 - ref.p2) < 1e-8) {
    // nearly degenerate: fall back to the single free pole
    ref.p1 = delta_prime;
    ref.p2 = c + cplx{0.0, -1.0};  // arbitrary pole with zero weight
    ref.r1 = 1.0;
    ref.r2 = 0.0;
    return ref;
  }
  ref.r1 = (ref.p1 - c) / (ref.p1 - ref.p2);
  ref.r2 = (ref.p2 - c) / (ref.p2 - ref.p1);
  return ref;
}

std::vector<cplx> line_transform(const std::vector<cplx>& samples, double span, double eta,
                                 const std::vector<double>& t_grid) {
  const int n = (int)samples.size();
  const double dx = 2.0 * span / (n - 1);
  std::vector<cplx> out(t_grid.size());
  for (size_t g = 0; g < t_grid.size(); ++g) {
    const double t = t_grid[g];
    cplx acc{0.0, 0.0};
    const cplx step = std::exp(-I * dx * t);
    cplx phase = std::exp(I * span * t);  // e^{-i x_0 t}, x_0 = -span
    for (int k = 0; k < n; ++k) {
      const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      acc += w * phase * samples[(size_t)k];
      phase *= step;
      if ((k & 4095) == 4095) phase = std::exp(I * (span - dx * (k + 1)) * t);
    }
    out[g] = std::exp(eta * t) * dx / (2.0 * PI) * acc;
  }
  return out;
}

double contour_eta(const BathParams& p, const std::vector<EmitterSpec>& emitters, Sheet sheet,
                   const ContourSpec& spec) {
  if (spec.eta != 0.0) return spec.eta;  // explicit height, validated downstream
  double top = spectral_top(p, sheet_variant(sheet));
  for (const EmitterSpec& em : emitters) top = std::max(top, em.delta_prime().imag());
  return std::max(top, 0.0) + spec.eta_margin * p.j2;
}

double contour_span(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                    const ContourSpec& spec) {
  if (spec.span > 0.0) return spec.span;
  double dmax = 0.0;
  for (const EmitterSpec& em : emitters) dmax = std::max(dmax, std::abs(em.delta));
  return spec.span_factor * (p.j1 + p.j2 + p.gamma_b + dmax);
}

}  // namespace detail

namespace {

TimeSeries evolve_emitters_once(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                                const std::vector<double>& t_grid, Sheet sheet, double eta,
                                double span, int n_omega, int initial) {
  const int na = (int)emitters.size();
  const double top_bound = [&] {
    double top = spectral_top(p, sheet_variant(sheet));
    for (const EmitterSpec& em : emitters) top = std::max(top, em.delta_prime().imag());
    return top;
  }();
  if (eta <= top_bound)
    fail(ErrorCode::ContourTooLow, "contour line does not clear the spectrum");

  const detail::RationalRef ref =
      detail::rational_ref(p, emitters[(size_t)initial].delta_prime(),
                           emitters[(size_t)initial].omega_rabi);
  if (ref.p1.imag() >= eta || ref.p2.imag() >= eta)
    fail(ErrorCode::ContourTooLow, "reference poles above the contour line");

  std::vector<std::vector<cplx>> samples((size_t)na, std::vector<cplx>((size_t)n_omega));
  const double dx = 2.0 * span / (n_omega - 1);
  for (int k = 0; k < n_omega; ++k) {
    const cplx w = cplx{-span + k * dx, eta};
    const Eigen::MatrixXcd g = green_matrix(p, emitters, w, sheet);
    for (int m = 0; m < na; ++m) {
      cplx val = g(m, initial);
      if (m == initial) val -= ref.eval(w);
      if (std::abs(val) > 1e6)
        fail(ErrorCode::ContourTooLow, "Green matrix nearly singular on the contour");
      samples[(size_t)m][(size_t)k] = val;
    }
  }

  TimeSeries ts;
  ts.times = t_grid;
  for (int m = 0; m < na; ++m) {
    std::vector<cplx> series = detail::line_transform(samples[(size_t)m], span, eta, t_grid);
    if (m == initial)
      for (size_t g = 0; g < t_grid.size(); ++g) series[g] += ref.eval_t(t_grid[g]);
    ts.values["emitter:" + std::to_string(m)] = std::move(series);
  }
  return ts;
}

}  // namespace

TimeSeries evolve_emitters(const BathParams& p, const std::vector<EmitterSpec>& emitters,
                           const std::vector<double>& t_grid, Sheet sheet,
                           const ContourSpec& contour, int initial) {
  p.validate();
  if (emitters.empty()) fail(ErrorCode::InvalidArgument, "no emitters");
  if (initial < 0 || initial >= (int)emitters.size())
    fail(ErrorCode::InvalidArgument, "initial emitter index out of range");
  if (t_grid.empty() || t_grid.front() < 0.0)
    fail(ErrorCode::InvalidArgument, "time grid must start at t >= 0");

  const double eta = detail::contour_eta(p, emitters, sheet, contour);
  const double span = detail::contour_span(p, emitters, contour);
  TimeSeries ts =
      evolve_emitters_once(p, emitters, t_grid, sheet, eta, span, contour.n_omega, initial);

  if (contour.check_aliasing) {
    TimeSeries half = evolve_emitters_once(p, emitters, t_grid, sheet, eta, span,
                                           contour.n_omega / 2, initial);
    double diff = 0.0;
    for (const auto& [label, series] : ts.values) {
      const auto& other = half.at(label);
      for (size_t g = 0; g < series.size(); ++g)
        diff = std::max(diff, std::abs(series[g] - other[g]));
    }
    if (diff > 1e-8)
      fail(ErrorCode::AliasingDetected, "halving the contour resolution moved the result");
  }
  return ts;
}

// ---------------------------------------------------------------------------
// bath correlation
// ---------------------------------------------------------------------------

namespace {

// (H_hop^p)_{site,site2} of the infinite physical hopping matrix, via a small
// k quadrature (the integrand is a trigonometric polynomial of degree p).
cplx hop_power_element(const BathParams& p, int power, BathSite site, BathSite site2) {
  const int n_k = 64;
  const int dj = site.second - site2.second;
  cplx acc{0.0, 0.0};
  for (int n = 0; n < n_k; ++n) {
    const double k = -PI + 2.0 * PI * n / n_k;
    Eigen::Matrix2cd h;
    h << 0.0, p.jp() + p.j2 * std::exp(-I * k), p.jm() + p.j2 * std::exp(I * k), 0.0;
    Eigen::Matrix2cd hp = Eigen::Matrix2cd::Identity();
    for (int q = 0; q < power; ++q) hp = hp * h;
    const int r = site.first == Sublattice::A ? 0 : 1;
    const int c = site2.first == Sublattice::A ? 0 : 1;
    acc += hp(r, c) * std::exp(I * (double)dj * k);
  }
  return acc / (double)n_k;
}

cplx sigma_site_element(const BathParams& p, cplx omega, BathSite site, BathSite site2,
                        Sheet sheet) {
  const Sublattice sm = site.first, sn = site2.first;
  Pair pair;
  int d;
  if (sm == Sublattice::A && sn == Sublattice::A) {
    pair = Pair::AA;
    d = site.second - site2.second;
  } else if (sm == Sublattice::B && sn == Sublattice::B) {
    pair = Pair::BB;
    d = site.second - site2.second;
  } else if (sm == Sublattice::A) {
    pair = Pair::AB;
    d = site2.second - site.second;
  } else {
    pair = Pair::BA;
    d = site.second - site2.second;
  }
  if (pair == Pair::AA && d == 0) return detail::sigma_onsite_raw(p, 1.0, omega, sheet, +1);
  return detail::sigma_cross_raw(p, 1.0, omega, d, pair, sheet, +1);
}

}  // namespace

std::vector<cplx> bath_correlation_series(const BathParams& p, const std::vector<double>& t_grid,
                                          BathSite site, BathSite site2, Sheet sheet,
                                          const ContourSpec& contour) {
  p.validate();
  for (double t : t_grid)
    if (t < 0.0) fail(ErrorCode::InvalidArgument, "bath correlation defined for t >= 0");
  const double eta = detail::contour_eta(p, {}, sheet, contour);
  const double span = detail::contour_span(p, {}, contour);
  const int n_omega = contour.n_omega;
  if (eta <= spectral_top(p, sheet == Sheet::First ? Variant::Physical : Variant::Mirage))
    fail(ErrorCode::ContourTooLow, "contour line does not clear the bath spectrum");

  // Taylor reference sum_{q<=4} (H^q)_el / ws^{q+1}; exact transform of each
  // term is -i (-i t)^q / q! e^{-gamma_b t / 2}.
  constexpr int kOrder = 4;
  cplx hpow[kOrder + 1];
  for (int q = 0; q <= kOrder; ++q) hpow[q] = hop_power_element(p, q, site, site2);

  const double dx = 2.0 * span / (n_omega - 1);
  std::vector<cplx> samples((size_t)n_omega);
  for (int k = 0; k < n_omega; ++k) {
    const cplx w = cplx{-span + k * dx, eta};
    const cplx ws = w + 0.5 * I * p.gamma_b;
    cplx refv{0.0, 0.0};
    cplx invw = 1.0 / ws;
    cplx f = invw;
    for (int q = 0; q <= kOrder; ++q) {
      refv += hpow[q] * f;
      f *= invw;
    }
    samples[(size_t)k] = sigma_site_element(p, w, site, site2, sheet) - refv;
  }

  std::vector<cplx> out = detail::line_transform(samples, span, eta, t_grid);
  for (size_t g = 0; g < t_grid.size(); ++g) {
    const double t = t_grid[g];
    const double decay = std::exp(-0.5 * p.gamma_b * t);
    cplx term{0.0, -1.0};  // -i (-i t)^q / q!
    double fact = 1.0;
    for (int q = 0; q <= kOrder; ++q) {
      out[g] += hpow[q] * term / fact * decay;
      term *= cplx{0.0, -t};
      fact *= (q + 1);
    }
  }
  return out;
}

cplx bath_correlation(const BathParams& p, double t, BathSite site, BathSite site2, Sheet sheet,
                      const ContourSpec& contour) {
  return bath_correlation_series(p, {t}, site, site2, sheet, contour).front();
}

// ---------------------------------------------------------------------------
// oscillation frequency extraction
// ---------------------------------------------------------------------------

double rabi_frequency_estimate(const TimeSeries& series, const std::string& label,
                               double gamma_b) {
  const std::vector<cplx>& v = series.at(label);
  if (v.size() != series.times.size() || v.size() < 8)
    fail(ErrorCode::InvalidArgument, "series too short");

  std::vector<double> s(v.size());
  double smax = 0.0, smin = 1e300;
  for (size_t i = 0; i < v.size(); ++i) {
    s[i] = std::exp(gamma_b * series.times[i]) * std::norm(v[i]);
    smax = std::max(smax, s[i]);
    smin = std::min(smin, s[i]);
  }
  const double range = smax - smin;
  if (!(range > 1e-3 * std::max(smax, 1e-300)))
    fail(ErrorCode::NoOscillationDetected, "signal is flat");

  // interior strict maxima above the noise floor, each preceded by a dip of
  // at least `drop` below the peak; small ripples on a decaying or rising
  // envelope fail the dip requirement
  const double floor = smin + 0.15 * range;
  const double drop = 0.15 * range;
  std::vector<double> peak_times;
  double dip = s.front();
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    dip = std::min(dip, s[i]);
    if (s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > floor && dip < s[i] - drop) {
      peak_times.push_back(series.times[i]);
      dip = s[i];
    }
  }
  if (peak_times.size() < 2)
    fail(ErrorCode::NoOscillationDetected, "fewer than two peaks above the noise floor");

  double spacing = 0.0;
  for (size_t i = 1; i < peak_times.size(); ++i) spacing += peak_times[i] - peak_times[i - 1];
  spacing /= (double)(peak_times.size() - 1);
  return 2.0 * PI / spacing;
}

}  // namespace sshbath
