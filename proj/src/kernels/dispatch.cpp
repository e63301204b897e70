#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "kernels_impl.hpp"
#include "twsense/errors.hpp"

namespace twsense::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(TWSENSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Level initial_level() noexcept {
  Level level = detect();
  if (const char* env = std::getenv("TWSENSE_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") level = Level::Scalar;
    else if (v == "avx2" && available(Level::Avx2)) level = Level::Avx2;
  }
  return level;
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{&table(initial_level())};
  return slot;
}

void check_len(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(expected) + " vs " +
                          std::to_string(got) + ")");
}

}  // namespace

const char* level_name(Level level) noexcept {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
  }
  return "unknown";
}

bool available(Level level) noexcept {
  switch (level) {
    case Level::Scalar: return true;
    case Level::Avx2: return cpu_has_avx2();
  }
  return false;
}

Level detect() noexcept { return available(Level::Avx2) ? Level::Avx2 : Level::Scalar; }

const KernelTable& table(Level level) {
  if (!available(level)) throw Unsupported(std::string("SIMD level not available: ") + level_name(level));
#ifdef TWSENSE_HAVE_AVX2
  if (level == Level::Avx2) return detail::kAvx2Table;
#endif
  return detail::kScalarTable;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

Level active_level() noexcept { return active().level; }

void set_active_level(Level level) { active_slot().store(&table(level), std::memory_order_release); }

void layer_step(cplx rho, cplx tau, std::span<const cplx> half, std::span<const cplx> round, std::span<cplx> refl,
                std::span<cplx> trans) {
  const std::size_t n = refl.size();
  check_len(n, half.size(), "layer_step");
  check_len(n, round.size(), "layer_step");
  check_len(n, trans.size(), "layer_step");
  active().layer_step(rho, tau, half.data(), round.data(), refl.data(), trans.data(), n);
}

void calibration_quotient(std::span<const cplx> raw, std::span<const cplx> bg, std::span<const cplx> metal,
                          std::span<cplx> out, std::span<double> denom_abs2) {
  const std::size_t n = out.size();
  check_len(n, raw.size(), "calibration_quotient");
  check_len(n, bg.size(), "calibration_quotient");
  check_len(n, metal.size(), "calibration_quotient");
  check_len(n, denom_abs2.size(), "calibration_quotient");
  active().calibration_quotient(raw.data(), bg.data(), metal.data(), out.data(), denom_abs2.data(), n);
}

void subtract(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  check_len(out.size(), a.size(), "subtract");
  check_len(out.size(), b.size(), "subtract");
  active().subtract(a.data(), b.data(), out.data(), out.size());
}

double sum_abs2_diff(std::span<const cplx> a, std::span<const cplx> b) {
  check_len(a.size(), b.size(), "sum_abs2_diff");
  return active().sum_abs2_diff(a.data(), b.data(), a.size());
}

}  // namespace twsense::simd
