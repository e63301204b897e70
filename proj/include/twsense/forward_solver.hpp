#pragma once

#include <array>

#include "twsense/em_core.hpp"

namespace twsense {

/// Field amplitudes of a plane wave normally incident on a wall/object/wall sandwich.
///
/// Interior amplitudes use global z (z = 0 at the front face), matching
///   wall 1:  α e^{−γ_w z} + β e^{γ_w z}
///   object:  θ e^{−γ_o z} + ρ e^{γ_o z}
///   wall 2:  χ e^{−γ_w z} + ξ e^{γ_w z}
/// `t` is the transmitted amplitude at the rear face z = 2t_w + t_o, so an
/// all-air sandwich gives t = e^{−jk(2t_w + t_o)}.
struct SandwichSolution {
  cplx r, alpha, beta, theta, rho, chi, xi, t;
  double residual;     // relative back-substitution residual of the 8x8 solve
  double pivot_ratio;  // max|pivot| / min|pivot|
};

using Matrix8 = std::array<std::array<cplx, 8>, 8>;
using Vector8 = std::array<cplx, 8>;

/// Boundary-matching system M·u = b with u = (r, α, β, θ, ρ, χ, ξ, t′) where t′
/// is the region-5 amplitude of t′e^{−jkz}. Rows: E then H continuity at
/// z = 0, t_w, t_w + t_o, 2t_w + t_o. b = (1, jk, 0, …, 0).
struct SandwichSystem {
  Matrix8 m;
  Vector8 b;
};

SandwichSystem assemble_sandwich_system(cplx eps_w, cplx eps_o, double t_w, double t_o, double frequency_hz);

/// ‖M·u − b‖∞ / (‖M‖∞·‖u‖∞ + ‖b‖∞)
double relative_residual(const SandwichSystem& sys, const Vector8& u);

inline constexpr double kMaxPivotRatio = 1e12;
inline constexpr double kMaxSolveResidual = 1e-9;

/// Solves the assembled 8x8 system by partial-pivoting elimination.
/// Throws ConditioningError (carrying the frequency) when the pivot ratio
/// exceeds kMaxPivotRatio, entries overflow, or the residual check fails.
SandwichSolution solve_sandwich(cplx eps_w, cplx eps_o, double t_w, double t_o, double frequency_hz);

/// Closed-form reflection of a single slab in air, referenced to its front face:
///   r = (1/ε − 1)(1 − e^{−j2k_w t}) / ((1/√ε + 1)² − (1/√ε − 1)² e^{−j2k_w t}),  k_w = k√ε.
cplx slab_reflection(cplx eps, double thickness_m, double frequency_hz);
ComplexSpectrum slab_reflection(cplx eps, double thickness_m, const FrequencyGrid& grid);

struct StackResponse {
  ComplexSpectrum r;  // referenced to the front face
  ComplexSpectrum t;  // transmitted amplitude at the rear face; zero when conductor-backed
};

/// Layer-recursive reflection/transmission of an arbitrary stack. Every
/// exponential is layer-local (|e^{−γd}| ≤ 1), so thick or very lossy layers
/// underflow gracefully instead of overflowing.
StackResponse stack_reflection(const Stack& stack, const FrequencyGrid& grid);

}  // namespace twsense
