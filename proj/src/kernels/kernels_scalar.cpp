#include "complex_ops.hpp"
#include "kernels_impl.hpp"

namespace twsense::simd::detail {

namespace {

void layer_step_scalar(cplx rho, cplx tau, const cplx* half, const cplx* round, cplx* refl, cplx* trans,
                       std::size_t n) {
  const C r = load(rho), t = load(tau);
  for (std::size_t i = 0; i < n; ++i) layer_step_one(r, t, half[i], round[i], refl[i], trans[i]);
}

void calibration_quotient_scalar(const cplx* raw, const cplx* bg, const cplx* metal, cplx* out, double* denom_abs2,
                                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) calibration_one(raw[i], bg[i], metal[i], out[i], denom_abs2[i]);
}

void subtract_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = store(sub(load(a[i]), load(b[i])));
}

double sum_abs2_diff_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += abs2(sub(load(a[i]), load(b[i])));
  return acc;
}

}  // namespace

const KernelTable kScalarTable{Level::Scalar, layer_step_scalar, calibration_quotient_scalar, subtract_scalar,
                               sum_abs2_diff_scalar};

}  // namespace twsense::simd::detail
