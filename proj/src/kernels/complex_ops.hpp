#pragma once

// Scalar complex arithmetic spelled out so the AVX2 lanes can reproduce it
// operation for operation. std::complex operator/ goes through __divdc3,
// which rescales and would not match.

#include "twsense/em_core.hpp"

namespace twsense::simd::detail {

struct C {
  double re, im;
};

inline C load(const cplx& z) { return {z.real(), z.imag()}; }
inline cplx store(C z) { return {z.re, z.im}; }

inline C add(C a, C b) { return {a.re + b.re, a.im + b.im}; }
inline C sub(C a, C b) { return {a.re - b.re, a.im - b.im}; }

inline C mul(C a, C b) { return {a.re * b.re - a.im * b.im, a.im * b.re + a.re * b.im}; }

inline double abs2(C b) { return b.re * b.re + b.im * b.im; }

inline C div(C a, C b) {
  const double d = abs2(b);
  const C n{a.re * b.re + a.im * b.im, a.im * b.re - a.re * b.im};
  return {n.re / d, n.im / d};
}

inline void layer_step_one(C rho, C tau, const cplx& half, const cplx& round, cplx& refl, cplx& trans) {
  const C x = mul(load(refl), load(round));
  const C d = add(C{1.0, 0.0}, mul(rho, x));
  const C r = div(add(rho, x), d);
  const C w = mul(mul(tau, load(half)), load(trans));
  refl = store(r);
  trans = store(div(w, d));
}

inline void calibration_one(const cplx& raw, const cplx& bg, const cplx& metal, cplx& out, double& denom_abs2) {
  const C num = sub(load(raw), load(bg));
  const C den = sub(load(bg), load(metal));
  out = store(div(num, den));
  denom_abs2 = abs2(den);
}

}  // namespace twsense::simd::detail
