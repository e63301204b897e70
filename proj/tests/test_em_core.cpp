#include "doctest.h"
#include "test_support.hpp"
#include "twsense/em_core.hpp"
#include "twsense/errors.hpp"

using namespace twsense;
using namespace twsense::test;

TEST_CASE("wavenumber") {
  CHECK(wavenumber(kSpeedOfLight / (2.0 * kPi)) == doctest::Approx(1.0).epsilon(1e-15));
  // 2πf/c₀ evaluated independently (tests/oracles/hand_values.py)
  CHECK(wavenumber(30e9) == doctest::Approx(628.7535065855045).epsilon(1e-14));
  CHECK(wavenumber(26.5e9) == doctest::Approx(555.3989308171956).epsilon(1e-14));
  CHECK_THROWS_AS(wavenumber(0.0), InvalidArgument);
  CHECK_THROWS_AS(wavenumber(-1.0), InvalidArgument);
  CHECK_THROWS_AS(wavenumber(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(wavenumber(INFINITY), InvalidArgument);

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double f = rng.uniform(1e6, 1e11), a = rng.uniform(0.01, 10.0);
    CHECK(wavenumber(a * f) == doctest::Approx(a * wavenumber(f)).epsilon(1e-14));
  }
}

TEST_CASE("propagation constant") {
  const double f = 30e9;
  const double k = wavenumber(f);

  SUBCASE("air is pure phase") {
    const cplx g = propagation_constant(Material::air(), f);
    CHECK(g == cplx(0.0, k));
  }
  SUBCASE("lossless dielectric") {
    const cplx g = propagation_constant(Material::dielectric(12.4), f);
    CHECK(g.real() == 0.0);
    CHECK(g.imag() == doctest::Approx(k * std::sqrt(12.4)).epsilon(1e-14));
    CHECK(g.imag() > 0.0);
  }
  SUBCASE("lossy dielectric decays with Re/|γ| ≈ tanδ/2") {
    const cplx g = propagation_constant(kCement, f);
    CHECK(g.real() > 0.0);
    CHECK(g.real() / std::abs(g) == doctest::Approx(0.0015).epsilon(1e-5));
    // direct complex square root
    const cplx direct = cplx(0.0, k) * std::sqrt(cplx(12.4, -12.4 * 0.003));
    CHECK(rel_err(g, direct) < 1e-15);
  }
  SUBCASE("perfect conductor is not a medium") {
    CHECK_THROWS_AS(propagation_constant(Material::perfect_conductor(), f), Unsupported);
  }
  SUBCASE("Re γ >= 0 for every passive dielectric") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
      const Material m = Material::dielectric(rng.uniform(0.1, 100.0), rng.uniform(0.0, 1.0));
      const cplx g = propagation_constant(m, rng.uniform(26.5e9, 40e9));
      CHECK(g.real() >= 0.0);
      CHECK(g.imag() > 0.0);
    }
  }
}

TEST_CASE("material invariants") {
  CHECK_THROWS_AS(Material::dielectric(0.0), InvalidArgument);
  CHECK_THROWS_AS(Material::dielectric(-2.0), InvalidArgument);
  CHECK_THROWS_AS(Material::dielectric(4.0, -0.1), InvalidArgument);
  CHECK_THROWS_AS(Material::dielectric(std::nan(""), 0.0), InvalidArgument);
  const Material pec = Material::perfect_conductor();
  CHECK(pec.is_conductor());
  CHECK_THROWS_AS(pec.permittivity(), Unsupported);
  CHECK_THROWS_AS(pec.eps_real(), Unsupported);
  CHECK(kCement.permittivity() == cplx(12.4, -12.4 * 0.003));
}

TEST_CASE("layers and stacks") {
  CHECK_THROWS_AS(Layer(Material::air(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(Layer(Material::air(), -1e-3), InvalidArgument);
  CHECK_THROWS_AS(Layer(Material::air(), INFINITY), InvalidArgument);
  CHECK_THROWS_AS(Stack({}), InvalidArgument);

  const Layer metal(Material::perfect_conductor(), 0.01);
  CHECK_NOTHROW(Stack({Layer(kCement, kWallT), metal}));
  CHECK(Stack({Layer(kCement, kWallT), metal}).conductor_backed());
  CHECK_THROWS_WITH_AS(Stack({metal, Layer(kCement, kWallT)}), doctest::Contains("last layer"), InvalidArgument);
  CHECK_THROWS_AS(Stack({metal, metal}), InvalidArgument);
  CHECK(Stack({Layer(kCement, kWallT), Layer(kWater, kObjectT), Layer(kCement, kWallT)}).total_thickness() ==
        doctest::Approx(2 * kWallT + kObjectT));
}

TEST_CASE("frequency grid") {
  const auto g = ka_band(1601);
  CHECK(g.size() == 1601);
  CHECK(g.front() == 26.5e9);
  CHECK(g.back() == 40e9);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(g[800] == doctest::Approx(33.25e9).epsilon(1e-15));

  CHECK(FrequencyGrid::linear(1e9, 2e9, 1).size() == 1);
  CHECK_THROWS_AS(FrequencyGrid::linear(0.0, 1e9, 3), InvalidArgument);
  CHECK_THROWS_AS(FrequencyGrid::linear(2e9, 1e9, 3), InvalidArgument);
  CHECK_THROWS_AS(FrequencyGrid::linear(1e9, 2e9, 0), InvalidArgument);
  CHECK_THROWS_AS(FrequencyGrid::from_points({1e9, 1e9}), InvalidArgument);
  CHECK_THROWS_AS(FrequencyGrid::from_points({}), InvalidArgument);
  CHECK_THROWS_AS(FrequencyGrid::from_points({-1.0, 1e9}), InvalidArgument);

  CHECK(g.matches(ka_band(1601)));
  CHECK_FALSE(g.matches(ka_band(1600)));
  CHECK_FALSE(g.matches(FrequencyGrid::linear(26.5e9, 40.1e9, 1601)));
}

TEST_CASE("complex spectrum") {
  CHECK_THROWS_AS(ComplexSpectrum(ka_band(3), std::vector<cplx>(2)), InvalidArgument);
  ComplexSpectrum s(ka_band(4));
  CHECK(s.all_valid());
  CHECK(s.valid_count() == 4);
  s.set_valid(2, false);
  CHECK_FALSE(s.is_valid(2));
  CHECK(s.is_valid(1));
  CHECK(s.valid_count() == 3);
  s.set_valid(2, true);
  CHECK(s.all_valid());
}
