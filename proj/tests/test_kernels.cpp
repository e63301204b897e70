// Scalar reference vs SIMD variants on random data.

#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "twsense/errors.hpp"
#include "twsense/kernels.hpp"

using namespace twsense;
using namespace twsense::test;

namespace {

std::vector<cplx> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = scale * cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return v;
}

std::vector<simd::Level> simd_levels() {
  std::vector<simd::Level> out;
  if (simd::available(simd::Level::Avx2)) out.push_back(simd::Level::Avx2);
  return out;
}

bool bit_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("dispatch") {
  CHECK(simd::available(simd::Level::Scalar));
  CHECK(simd::table(simd::Level::Scalar).level == simd::Level::Scalar);
  const simd::Level before = simd::active_level();
  simd::set_active_level(simd::Level::Scalar);
  CHECK(simd::active_level() == simd::Level::Scalar);
  simd::set_active_level(before);
  if (!simd::available(simd::Level::Avx2)) CHECK_THROWS_AS(simd::table(simd::Level::Avx2), Unsupported);
  MESSAGE("active kernels: " << simd::level_name(simd::active_level()));
}

TEST_CASE("simd kernels reproduce the scalar reference") {
  const auto& ref = simd::table(simd::Level::Scalar);
  if (simd_levels().empty()) MESSAGE("no SIMD variant available on this CPU; only the scalar path is exercised");
  Rng rng(1234);
  for (simd::Level lvl : simd_levels()) {
    const auto& k = simd::table(lvl);
    CAPTURE(simd::level_name(lvl));
    // odd and even lengths exercise the scalar tail
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 64u, 101u, 1601u}) {
      CAPTURE(n);
      {  // layer_step
        const auto half = random_vec(rng, n), round = random_vec(rng, n);
        auto refl_a = random_vec(rng, n), trans_a = random_vec(rng, n);
        auto refl_b = refl_a, trans_b = trans_a;
        const cplx rho(rng.uniform(-1, 1), rng.uniform(-1, 1)), tau = 1.0 + rho;
        ref.layer_step(rho, tau, half.data(), round.data(), refl_a.data(), trans_a.data(), n);
        k.layer_step(rho, tau, half.data(), round.data(), refl_b.data(), trans_b.data(), n);
        CHECK(bit_equal(refl_a, refl_b));
        CHECK(bit_equal(trans_a, trans_b));
      }
      {  // calibration_quotient
        const auto raw = random_vec(rng, n), bg = random_vec(rng, n), metal = random_vec(rng, n, 3.0);
        std::vector<cplx> out_a(n), out_b(n);
        std::vector<double> d_a(n), d_b(n);
        ref.calibration_quotient(raw.data(), bg.data(), metal.data(), out_a.data(), d_a.data(), n);
        k.calibration_quotient(raw.data(), bg.data(), metal.data(), out_b.data(), d_b.data(), n);
        CHECK(bit_equal(out_a, out_b));
        CHECK(d_a == d_b);
      }
      {  // subtract
        const auto a = random_vec(rng, n), b = random_vec(rng, n);
        std::vector<cplx> out_a(n), out_b(n);
        ref.subtract(a.data(), b.data(), out_a.data(), n);
        k.subtract(a.data(), b.data(), out_b.data(), n);
        CHECK(bit_equal(out_a, out_b));
      }
      {  // sum_abs2_diff
        const auto a = random_vec(rng, n), b = random_vec(rng, n);
        const double s_ref = ref.sum_abs2_diff(a.data(), b.data(), n);
        const double s = k.sum_abs2_diff(a.data(), b.data(), n);
        CHECK(s == doctest::Approx(s_ref).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("scalar kernels against std::complex") {
  const auto& ref = simd::table(simd::Level::Scalar);
  Rng rng(99);
  const std::size_t n = 33;
  const auto half = random_vec(rng, n), round = random_vec(rng, n);
  auto refl = random_vec(rng, n), trans = random_vec(rng, n);
  const auto refl0 = refl, trans0 = trans;
  const cplx rho(0.3, -0.2), tau = 1.0 + rho;
  ref.layer_step(rho, tau, half.data(), round.data(), refl.data(), trans.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx x = refl0[i] * round[i];
    const cplx d = 1.0 + rho * x;
    CHECK(rel_err(refl[i], (rho + x) / d) < 1e-14);
    CHECK(rel_err(trans[i], trans0[i] * tau * half[i] / d) < 1e-14);
  }
  const double s = ref.sum_abs2_diff(half.data(), round.data(), n);
  double expect = 0.0;
  for (std::size_t i = 0; i < n; ++i) expect += std::norm(half[i] - round[i]);
  CHECK(s == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("span front ends validate lengths") {
  std::vector<cplx> a(3), b(4), out(3);
  CHECK_THROWS_AS(simd::subtract(a, b, out), InvalidArgument);
  CHECK_THROWS_AS(simd::sum_abs2_diff(a, b), InvalidArgument);
}
