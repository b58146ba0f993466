#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sshbath/bath.hpp"

using namespace sshbath;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }
}  // namespace

TEST_CASE("dispersion: closed gap closes at j1=j2, k=pi") {
  BathParams p{1.0, 1.0, 0.0};
  CHECK(std::abs(dispersion(p, PI, +1, Variant::Closed)) < 1e-12);
}

TEST_CASE("dispersion: physical band at k=0") {
  BathParams p{1.02, 1.0, 0.05};
  const cplx expect = -0.025 * I + std::sqrt(cplx{2.02 * 2.02 - 0.025 * 0.025, 0.0});
  const cplx got = dispersion(p, 0.0, +1, Variant::Physical);
  CHECK(std::abs(got - expect) < 1e-14);
  CHECK(std::abs(got.real() - 2.0198) < 1e-3);
  CHECK(std::abs(got.imag() + 0.025) < 1e-12);
}

TEST_CASE("dispersion: mirage imaginary part is -gamma_b/2 for every k") {
  BathParams p{1.02, 1.0, 0.05};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uk(-PI, PI);
  for (int i = 0; i < 200; ++i) {
    const double k = uk(rng);
    CHECK(dispersion(p, k, +1, Variant::Mirage).imag() == doctest::Approx(-0.025).epsilon(1e-14));
    CHECK(dispersion(p, k, -1, Variant::Mirage).imag() == doctest::Approx(-0.025).epsilon(1e-14));
  }
}

TEST_CASE("dispersion: physical at gamma_b=0 equals closed exactly") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uj(0.2, 2.0), uk(-PI, PI);
  for (int i = 0; i < 300; ++i) {
    BathParams p{uj(rng), 1.0, 0.0};
    const double k = uk(rng);
    for (int band : {+1, -1}) {
      CHECK(std::abs(dispersion(p, k, band, Variant::Physical) -
                     dispersion(p, k, band, Variant::Closed)) < 1e-14);
    }
  }
}

TEST_CASE("classify_phase examples and boundary error") {
  CHECK(classify_phase({1.02, 1.0, 0.05}) == Phase::PointGap);
  CHECK(classify_phase({0.7, 1.0, 0.05}) == Phase::TopologicalLineGap);
  CHECK(classify_phase({1.1, 1.0, 0.0}) == Phase::TrivialLineGap);
  CHECK_THROWS_AS(classify_phase({1.025, 1.0, 0.05}), Error);
  try {
    classify_phase({0.975, 1.0, 0.05});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OnPhaseBoundary);
  }
}

TEST_CASE("classify_mirage_phase examples") {
  CHECK(classify_mirage_phase({1.02, 1.0, 0.05}) == Phase::Trivial);
  CHECK(classify_mirage_phase({0.98, 1.0, 0.05}) == Phase::Topological);
  try {
    classify_mirage_phase({1.0, 1.0, 0.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OnPhaseBoundary);
  }
  try {
    classify_mirage_phase({0.02, 1.0, 0.05});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MirageUndefined);
  }
}

TEST_CASE("mirage_map values and identities") {
  const MirageParams m = mirage_map({1.02, 1.0, 0.05});
  CHECK(m.j1_tilde == doctest::Approx(1.019694).epsilon(1e-5));
  CHECK(m.r == doctest::Approx(std::sqrt(0.995 / 1.045)).epsilon(1e-14));

  const MirageParams id = mirage_map({1.1, 1.0, 0.0});
  CHECK(id.j1_tilde == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(id.r == doctest::Approx(1.0).epsilon(1e-15));

  const MirageParams m2 = mirage_map({1.1, 1.0, 0.1});
  CHECK(m2.j1_tilde == doctest::Approx(1.098863).epsilon(1e-5));
  CHECK(m2.r == doctest::Approx(0.955533).epsilon(1e-5));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uj(0.3, 2.0), ug(0.0, 0.4);
  for (int i = 0; i < 300; ++i) {
    BathParams p{uj(rng), 1.0, ug(rng)};
    if (!(p.j1 > 0.5 * p.gamma_b)) continue;
    const MirageParams mm = mirage_map(p);
    CHECK(mm.j1_tilde * mm.j1_tilde + 0.25 * p.gamma_b * p.gamma_b ==
          doctest::Approx(p.j1 * p.j1).epsilon(1e-13));
    CHECK(mm.r * mm.r * p.jp() == doctest::Approx(p.jm()).epsilon(1e-13));
    // mirage label agrees with j1_tilde vs j2
    bool topo;
    try {
      topo = classify_mirage_phase(p) == Phase::Topological;
    } catch (const Error&) {
      continue;
    }
    CHECK(topo == (mm.j1_tilde < p.j2));
  }
}

TEST_CASE("region_of examples") {
  CHECK(region_of({1.02, 1.0, 0.05}, cplx{0.0, -0.025}) == Region::II);
  CHECK(region_of({1.1, 1.0, 0.05}, cplx{5.0, 0.0}) == Region::I);
  // just outside the loop: beyond the right band edge at the loop's height
  CHECK(region_of({1.02, 1.0, 0.05}, cplx{2.1, -0.025}) == Region::I);
}

TEST_CASE("gap_boundaries values") {
  const GapBoundaries a = gap_boundaries({1.0, 1.0, 0.05});
  CHECK(a.physical_lower == doctest::Approx(0.975).epsilon(1e-15));
  CHECK(a.physical_upper == doctest::Approx(1.025).epsilon(1e-15));
  CHECK(a.mirage == doctest::Approx(1.000312).epsilon(1e-5));

  const GapBoundaries b = gap_boundaries({1.0, 1.0, 0.0});
  CHECK(b.physical_lower == 1.0);
  CHECK(b.physical_upper == 1.0);
  CHECK(b.mirage == 1.0);

  const GapBoundaries c = gap_boundaries({1.0, 2.0, 0.2});
  CHECK(c.physical_lower == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(c.physical_upper == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(c.mirage == doctest::Approx(2.002498).epsilon(1e-5));
}

TEST_CASE("classify_phase flips across gap_boundaries") {
  BathParams base{1.0, 1.0, 0.08};
  const GapBoundaries g = gap_boundaries(base);
  const double eps = 1e-6;
  CHECK(classify_phase({g.physical_lower - eps, 1.0, 0.08}) == Phase::TopologicalLineGap);
  CHECK(classify_phase({g.physical_lower + eps, 1.0, 0.08}) == Phase::PointGap);
  CHECK(classify_phase({g.physical_upper - eps, 1.0, 0.08}) == Phase::PointGap);
  CHECK(classify_phase({g.physical_upper + eps, 1.0, 0.08}) == Phase::TrivialLineGap);
  CHECK(classify_mirage_phase({g.mirage - eps, 1.0, 0.08}) == Phase::Topological);
  CHECK(classify_mirage_phase({g.mirage + eps, 1.0, 0.08}) == Phase::Trivial);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(dispersion({1.0, -1.0, 0.0}, 0.0, +1, Variant::Closed), Error);
  CHECK_THROWS_AS(dispersion({-0.1, 1.0, 0.0}, 0.0, +1, Variant::Closed), Error);
  CHECK_THROWS_AS(dispersion({0.1, 1.0, 0.5}, 0.0, +1, Variant::Mirage), Error);
}
