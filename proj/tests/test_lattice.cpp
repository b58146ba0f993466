#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "sshbath/lattice.hpp"
#include "sshbath/selfenergy.hpp"
#include "test_support.hpp"

using namespace sshbath;
using namespace sshbath::testing;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t((size_t)n);
  for (int i = 0; i < n; ++i) t[(size_t)i] = a + (b - a) * i / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("build_heff: closed limit is Hermitian") {
  BathParams p{0.9, 1.0, 0.0};
  EmitterSpec em{Sublattice::A, 10, 0.0, 0.0, 0.1};
  const LatticeOperator op = build_heff(p, {em}, 20, Boundary::PBC, Sheet::First);
  // check H == H^dag through random vectors
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> x((size_t)op.dim()), y((size_t)op.dim()), hx((size_t)op.dim()),
      hy((size_t)op.dim());
  for (auto* v : {&x, &y})
    for (cplx& c : *v) c = cplx{u(rng), u(rng)};
  op.matrix.apply(x.data(), hx.data());
  op.matrix.apply(y.data(), hy.data());
  cplx a{0.0, 0.0}, b{0.0, 0.0};
  for (int i = 0; i < op.dim(); ++i) {
    a += std::conj(y[(size_t)i]) * hx[(size_t)i];
    b += std::conj(hy[(size_t)i]) * x[(size_t)i];
  }
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("build_heff: PBC bath spectrum traces the Bloch loops") {
  BathParams p{1.02, 1.0, 0.05};
  const int n_b = 120;
  const LatticeOperator op = build_heff(p, {}, n_b, Boundary::PBC, Sheet::First);
  const std::vector<cplx> ev = full_spectrum(op);
  CHECK((int)ev.size() == 2 * n_b);
  for (const cplx e : ev) {
    double dist = 1e300;
    for (int m = 0; m < n_b; ++m) {
      const double k = -PI + 2.0 * PI * m / n_b;
      dist = std::min(dist, std::abs(e - dispersion(p, k, +1, Variant::Physical)));
      dist = std::min(dist, std::abs(e - dispersion(p, k, -1, Variant::Physical)));
    }
    CHECK(dist < 1e-8);
  }
}

TEST_CASE("spectral duality: mirage PBC bath on the physical OBC bulk curve") {
  BathParams p{0.7, 1.0, 0.05};
  const int n_b = 40;
  const LatticeOperator pbc = build_heff(p, {}, n_b, Boundary::PBC, Sheet::Second);
  const LatticeOperator obc = build_heff(p, {}, n_b, Boundary::OBC, Sheet::First);
  const double half_gap = 0.5 * std::abs(mirage_map(p).j1_tilde - p.j2);

  int bulk_count = 0;
  for (const cplx e : full_spectrum(obc)) {
    if (std::abs(e.real()) < half_gap) continue;  // topological edge pair
    CHECK(mirage_curve_distance(p, e) < 1e-8);
    ++bulk_count;
  }
  CHECK(bulk_count >= 2 * n_b - 2);
  for (const cplx e : full_spectrum(pbc)) CHECK(mirage_curve_distance(p, e) < 1e-8);
}

TEST_CASE("evolve_state: trivial Hamiltonians") {
  // diagonal decay: bath-only lattice with huge gamma_b has on-site -i g/2
  BathParams p{0.0, 1e-30, 1.0};
  // hand-build: single decoupled emitter via delta' only
  EmitterSpec em{Sublattice::A, 2, 0.3, 0.2, 1e-12};
  const LatticeOperator op = build_heff({1.0, 1.0, 0.0}, {em}, 6, Boundary::PBC, Sheet::First);
  std::vector<cplx> psi((size_t)op.dim(), cplx{0.0, 0.0});
  psi[0] = 1.0;
  const TimeSeries ts = evolve_state(op, psi, linspace(0.0, 8.0, 17), {0});
  for (size_t i = 0; i < ts.times.size(); ++i) {
    const double t = ts.times[i];
    const cplx expect = std::exp(-I * em.delta_prime() * t);
    CHECK(std::abs(ts.at("idx:0")[i] - expect) < 1e-8);
  }
}

TEST_CASE("evolve_state: norm non-increasing on the first sheet") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> uj(0.4, 1.6), ug(0.0, 0.3), uo(0.05, 0.3),
      ua(0.01, 0.2), ur(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    BathParams p{uj(rng), 1.0, ug(rng)};
    EmitterSpec em{rep % 2 ? Sublattice::A : Sublattice::B, 8, 0.0, ua(rng), uo(rng)};
    const LatticeOperator op = build_heff(p, {em}, 16, rep % 3 ? Boundary::PBC : Boundary::OBC,
                                          Sheet::First);
    std::vector<cplx> psi((size_t)op.dim());
    double n2 = 0.0;
    for (cplx& c : psi) {
      c = cplx{ur(rng), ur(rng)};
      n2 += std::norm(c);
    }
    for (cplx& c : psi) c /= std::sqrt(n2);
    const TimeSeries ts = evolve_state(op, psi, linspace(0.0, 15.0, 31), {});
    const auto& norm = ts.at("norm");
    for (size_t i = 1; i < norm.size(); ++i)
      CHECK(norm[i].real() <= norm[i - 1].real() * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("eigenmode_near: recovers analytic bound states") {
  const int n_b = 80;
  const int center = n_b / 2;

  SUBCASE("closed bath midgap") {
    BathParams p{1.1, 1.0, 0.0};
    EmitterSpec em{Sublattice::A, center, 0.0, 0.0, 0.1};
    const LatticeOperator op = build_heff(p, {em}, n_b, Boundary::PBC, Sheet::First);
    const auto [val, vec] = eigenmode_near(op, cplx{0.0, 0.0});
    CHECK(std::abs(val) < 1e-10);
    const BoundState bs = bs_midgap_closed_form(p, Sublattice::A, Sheet::First, 0.1);
    CHECK(eigvec_vs_bound_state(op, vec, bs, center) < 1e-9);
  }

  SUBCASE("dissipative bath midgap, both sheets") {
    BathParams p{1.1, 1.0, 0.1};
    for (Sheet sheet : {Sheet::First, Sheet::Second}) {
      EmitterSpec em{Sublattice::B, center, 0.0, 0.1, 0.1};
      const LatticeOperator op = build_heff(p, {em}, n_b, Boundary::PBC, sheet);
      const auto [val, vec] = eigenmode_near(op, cplx{0.0, -0.05});
      CHECK(std::abs(val - cplx{0.0, -0.05}) < 1e-10);
      const BoundState bs = bs_midgap_closed_form(p, Sublattice::B, sheet, 0.1);
      CHECK(eigvec_vs_bound_state(op, vec, bs, center) < 1e-9);
    }
  }

  SUBCASE("OBC dark state") {
    BathParams p{1.1, 1.0, 0.1};
    EmitterSpec em{Sublattice::A, center, 0.0, 0.1, 0.1};
    const LatticeOperator op = build_heff(p, {em}, n_b, Boundary::OBC, Sheet::First);
    const auto [val, vec] = eigenmode_near(op, cplx{0.0, -0.05});
    CHECK(std::abs(val - cplx{0.0, -0.05}) < 1e-10);
    const BoundState dark = obc_dark_state(p, 0.1, Sublattice::A, center);
    CHECK(eigvec_vs_bound_state(op, vec, dark, center) < 1e-9);
  }
}

TEST_CASE("analytic bound states are bulk eigenstates of the big lattice") {
  const int n_b = 500;
  const int center = n_b / 2;
  BathParams p{1.03, 1.0, 0.1};
  for (Sheet sheet : {Sheet::First, Sheet::Second}) {
    for (Sublattice s : {Sublattice::A, Sublattice::B}) {
      EmitterSpec em{s, center, 0.0, 0.1, 0.1};
      const LatticeOperator op = build_heff(p, {em}, n_b, Boundary::PBC, sheet);
      const BoundState bs = bs_wavefunction(p, em, sheet);
      CHECK(bulk_residual(op, bs, center) < 1e-8);
    }
  }
}

TEST_CASE("PBC vs OBC single-emitter dynamics agree before the revival time") {
  BathParams p{1.02, 1.0, 0.05};
  const int n_b = 200;
  EmitterSpec em{Sublattice::A, n_b / 2, 0.0, 0.05, 0.2};
  const std::vector<double> t = linspace(0.0, 40.0, 81);  // < n_b / (2 v_max)
  TimeSeries res[2];
  int idx = 0;
  for (Boundary b : {Boundary::PBC, Boundary::OBC}) {
    const LatticeOperator op = build_heff(p, {em}, n_b, b, Sheet::First);
    std::vector<cplx> psi((size_t)op.dim(), cplx{0.0, 0.0});
    psi[(size_t)op.emitter_index(0)] = 1.0;
    res[idx++] = evolve_state(op, psi, t, {op.emitter_index(0)});
  }
  const auto& a = res[0].at("idx:0");
  const auto& b = res[1].at("idx:0");
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-6);
}

TEST_CASE("two_excitation_build: dimension formula at n_b = 3") {
  BathParams p{1.0, 1.0, 0.1};
  EmitterSpec em{Sublattice::A, 1, 0.0, 0.1, 0.1};
  const LatticeOperator op = two_excitation_build(p, em, 0.3, 4, Boundary::PBC, Sheet::First);
  const int modes = 1 + 2 * 4;
  CHECK(op.dim() == modes * (modes + 1) / 2);
  // explicit enumeration of ordered pairs
  int count = 0;
  for (int a = 0; a < modes; ++a)
    for (int b = a; b < modes; ++b) {
      CHECK(op.pair_index(a, b) == count);
      ++count;
    }
  CHECK(count == op.dim());
}

TEST_CASE("two_excitation_build: U=0 factorizes into single-particle dynamics") {
  BathParams p{1.05, 1.0, 0.08};
  const int n_b = 12;
  EmitterSpec em{Sublattice::A, n_b / 2, 0.0, 0.06, 0.15};
  const std::vector<double> t = linspace(0.0, 10.0, 21);

  const LatticeOperator two = two_excitation_build(p, em, 0.0, n_b, Boundary::PBC, Sheet::First);
  std::vector<cplx> psi2((size_t)two.dim(), cplx{0.0, 0.0});
  psi2[(size_t)two.pair_index(0, 0)] = std::sqrt(2.0);  // a^dag^2 |0>
  const TimeSeries d2 = evolve_state(two, psi2, t, {two.pair_index(0, 0)});

  const LatticeOperator one = build_heff(p, {em}, n_b, Boundary::PBC, Sheet::First);
  std::vector<cplx> psi1((size_t)one.dim(), cplx{0.0, 0.0});
  psi1[(size_t)one.emitter_index(0)] = 1.0;
  const TimeSeries d1 = evolve_state(one, psi1, t, {one.emitter_index(0)});

  for (size_t i = 0; i < t.size(); ++i) {
    // c_ee(t) = sqrt(2) g(t)^2 for independent bosons
    const cplx g = d1.at("idx:0")[i];
    const cplx expect = std::sqrt(2.0) * g * g;
    CHECK(std::abs(d2.at("idx:" + std::to_string(two.pair_index(0, 0)))[i] - expect) < 1e-7);
  }
}

TEST_CASE("binary dumps round-trip") {
  BathParams p{1.1, 1.0, 0.05};
  EmitterSpec em{Sublattice::B, 3, 0.1, 0.02, 0.2};
  const LatticeOperator op = build_heff(p, {em}, 8, Boundary::OBC, Sheet::Second);
  const std::string path = "/tmp/sshbath_test_op.bin";
  save_operator(op, path);
  const LatticeOperator back = load_operator(path);
  CHECK(back.dim() == op.dim());
  CHECK(back.boundary == op.boundary);
  CHECK(back.sheet == op.sheet);
  CHECK(back.n_cells == op.n_cells);
  CHECK(back.matrix.val == op.matrix.val);
  CHECK(back.matrix.col == op.matrix.col);

  std::vector<cplx> psi((size_t)op.dim());
  for (int i = 0; i < op.dim(); ++i) psi[(size_t)i] = cplx{(double)i, -0.5 * i};
  save_state(psi, "/tmp/sshbath_test_state.bin");
  CHECK(load_state("/tmp/sshbath_test_state.bin") == psi);
  std::remove(path.c_str());
  std::remove("/tmp/sshbath_test_state.bin");
}

TEST_CASE("dimension guards") {
  BathParams p{1.0, 1.0, 0.1};
  EmitterSpec em{Sublattice::A, 0, 0.0, 0.1, 0.1};
  CHECK_THROWS_AS(two_excitation_build(p, em, 0.1, 101, Boundary::PBC, Sheet::First), Error);
  CHECK_THROWS_AS(build_heff(p, {em}, 3, Boundary::PBC, Sheet::First), Error);
}
