// Built with -mavx2; only reached after a runtime CPU check.
#ifndef __AVX2__
#error "kernels_avx2.cpp must be compiled with AVX2 enabled"
#endif

#include <immintrin.h>

#include "complex_ops.hpp"
#include "kernels_impl.hpp"

namespace twsense::simd::detail {

namespace {

// Two interleaved complex doubles per register: [re0 im0 re1 im1].

inline __m256d vload(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void vstore(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d vbroadcast(cplx z) { return _mm256_setr_pd(z.real(), z.imag(), z.real(), z.imag()); }

inline __m256d vmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(a, b_re), _mm256_mul_pd(a_sw, b_im));
}

inline __m256d vdiv(__m256d a, __m256d b) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  const __m256d num =
      _mm256_addsub_pd(_mm256_mul_pd(a, b_re), _mm256_xor_pd(_mm256_mul_pd(a_sw, b_im), sign));
  const __m256d bb = _mm256_mul_pd(b, b);
  const __m256d den = _mm256_hadd_pd(bb, bb);
  return _mm256_div_pd(num, den);
}

void layer_step_avx2(cplx rho, cplx tau, const cplx* half, const cplx* round, cplx* refl, cplx* trans,
                     std::size_t n) {
  const __m256d vrho = vbroadcast(rho);
  const __m256d vtau = vbroadcast(tau);
  const __m256d one = _mm256_setr_pd(1.0, 0.0, 1.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = vmul(vload(refl + i), vload(round + i));
    const __m256d d = _mm256_add_pd(one, vmul(vrho, x));
    const __m256d r = vdiv(_mm256_add_pd(vrho, x), d);
    const __m256d w = vmul(vmul(vtau, vload(half + i)), vload(trans + i));
    vstore(refl + i, r);
    vstore(trans + i, vdiv(w, d));
  }
  const C r = load(rho), t = load(tau);
  for (; i < n; ++i) layer_step_one(r, t, half[i], round[i], refl[i], trans[i]);
}

void calibration_quotient_avx2(const cplx* raw, const cplx* bg, const cplx* metal, cplx* out, double* denom_abs2,
                               std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d b = vload(bg + i);
    const __m256d num = _mm256_sub_pd(vload(raw + i), b);
    const __m256d den = _mm256_sub_pd(b, vload(metal + i));
    vstore(out + i, vdiv(num, den));
    const __m256d dd = _mm256_mul_pd(den, den);
    const __m256d h = _mm256_hadd_pd(dd, dd);  // [d0 d0 d1 d1]
    denom_abs2[i] = _mm256_cvtsd_f64(h);
    denom_abs2[i + 1] = _mm256_cvtsd_f64(_mm256_permute4x64_pd(h, 0x2));
  }
  for (; i < n; ++i) calibration_one(raw[i], bg[i], metal[i], out[i], denom_abs2[i]);
}

void subtract_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vstore(out + i, _mm256_sub_pd(vload(a + i), vload(b + i)));
  for (; i < n; ++i) out[i] = store(sub(load(a[i]), load(b[i])));
}

double sum_abs2_diff_avx2(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_sub_pd(vload(a + i), vload(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += abs2(sub(load(a[i]), load(b[i])));
  return total;
}

}  // namespace

const KernelTable kAvx2Table{Level::Avx2, layer_step_avx2, calibration_quotient_avx2, subtract_avx2,
                             sum_abs2_diff_avx2};

}  // namespace twsense::simd::detail
