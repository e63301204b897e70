#pragma once

// Data-parallel per-frequency kernels. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant; the variant is picked at
// runtime from the CPU features (override with TWSENSE_SIMD=scalar|avx2).
//
// Element-wise kernels perform the same IEEE operations in the same order in
// every variant, so their outputs are bit-identical. Reductions differ only in
// summation order.

#include <cstddef>
#include <span>

#include "twsense/em_core.hpp"

namespace twsense::simd {

enum class Level { Scalar, Avx2 };

const char* level_name(Level level) noexcept;

struct KernelTable {
  Level level;

  // One step of the back-to-front layer recursion, per frequency i:
  //   x = refl[i] * round[i];  d = 1 + rho * x
  //   refl[i]  = (rho + x) / d
  //   trans[i] = trans[i] * (tau * half[i]) / d
  void (*layer_step)(cplx rho, cplx tau, const cplx* half, const cplx* round, cplx* refl, cplx* trans,
                     std::size_t n);

  // out[i] = (raw[i] - bg[i]) / (bg[i] - metal[i]);  denom_abs2[i] = |bg[i] - metal[i]|^2
  void (*calibration_quotient)(const cplx* raw, const cplx* bg, const cplx* metal, cplx* out, double* denom_abs2,
                               std::size_t n);

  void (*subtract)(const cplx* a, const cplx* b, cplx* out, std::size_t n);

  // sum_i |a[i] - b[i]|^2
  double (*sum_abs2_diff)(const cplx* a, const cplx* b, std::size_t n);
};

bool available(Level level) noexcept;
Level detect() noexcept;

/// Throws Unsupported if the level is not compiled in or not supported by this CPU.
const KernelTable& table(Level level);

const KernelTable& active() noexcept;
Level active_level() noexcept;
void set_active_level(Level level);

// Span front ends over the active table. Lengths must agree (InvalidArgument otherwise).
void layer_step(cplx rho, cplx tau, std::span<const cplx> half, std::span<const cplx> round, std::span<cplx> refl,
                std::span<cplx> trans);
void calibration_quotient(std::span<const cplx> raw, std::span<const cplx> bg, std::span<const cplx> metal,
                          std::span<cplx> out, std::span<double> denom_abs2);
void subtract(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
double sum_abs2_diff(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace twsense::simd
