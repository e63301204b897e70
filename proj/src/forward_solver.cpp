#include "twsense/forward_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "twsense/errors.hpp"
#include "twsense/kernels.hpp"

namespace twsense {

namespace {

constexpr cplx kJ{0.0, 1.0};

void check_sandwich_args(cplx eps_w, cplx eps_o, double t_w, double t_o, double f) {
  if (!std::isfinite(t_w) || t_w <= 0.0) throw InvalidArgument("wall thickness must be > 0 m");
  if (!std::isfinite(t_o) || t_o <= 0.0) throw InvalidArgument("object thickness must be > 0 m");
  if (!std::isfinite(f) || f <= 0.0) throw InvalidArgument("frequency must be > 0 Hz");
  for (cplx e : {eps_w, eps_o}) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()) || e.real() <= 0.0 || e.imag() > 0.0)
      throw InvalidArgument("permittivity must be finite with Re > 0 and Im <= 0");
  }
}

double inf_norm(const Vector8& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Elimination {
  Vector8 u;
  double pivot_ratio;
};

// Gaussian elimination with partial pivoting on a row- and column-equilibrated
// copy of the system. The growing and decaying exponentials otherwise spread the
// entries over many decades and the pivot ratio would reflect scaling alone.
Elimination eliminate(Matrix8 a, Vector8 b) {
  for (std::size_t i = 0; i < 8; ++i) {
    double m = 0.0;
    for (const auto& x : a[i]) m = std::max(m, std::abs(x));
    if (m == 0.0) return {{}, std::numeric_limits<double>::infinity()};
    for (auto& x : a[i]) x /= m;
    b[i] /= m;
  }
  std::array<double, 8> col_scale{};
  for (std::size_t c = 0; c < 8; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < 8; ++i) m = std::max(m, std::abs(a[i][c]));
    if (m == 0.0) return {{}, std::numeric_limits<double>::infinity()};
    col_scale[c] = m;
    for (std::size_t i = 0; i < 8; ++i) a[i][c] /= m;
  }

  double max_pivot = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t col = 0; col < 8; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < 8; ++row)
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    const double mag = std::abs(a[col][col]);
    max_pivot = std::max(max_pivot, mag);
    min_pivot = std::min(min_pivot, mag);
    if (mag == 0.0) return {{}, std::numeric_limits<double>::infinity()};
    for (std::size_t row = col + 1; row < 8; ++row) {
      const cplx factor = a[row][col] / a[col][col];
      if (factor == cplx{}) continue;
      for (std::size_t k = col; k < 8; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  Vector8 u{};
  for (std::size_t i = 8; i-- > 0;) {
    cplx acc = b[i];
    for (std::size_t k = i + 1; k < 8; ++k) acc -= a[i][k] * u[k];
    u[i] = acc / a[i][i];
  }
  for (std::size_t c = 0; c < 8; ++c) u[c] /= col_scale[c];
  return {u, max_pivot / min_pivot};
}

}  // namespace

SandwichSystem assemble_sandwich_system(cplx eps_w, cplx eps_o, double t_w, double t_o, double frequency_hz) {
  check_sandwich_args(eps_w, eps_o, t_w, t_o, frequency_hz);
  const double k = wavenumber(frequency_hz);
  const cplx jk = kJ * k;
  const cplx gw = propagation_constant(eps_w, frequency_hz);
  const cplx go = propagation_constant(eps_o, frequency_hz);
  const double z1 = t_w, z2 = t_w + t_o, z3 = 2.0 * t_w + t_o;

  SandwichSystem s{};
  auto& m = s.m;
  // Unknown columns: 0 r, 1 α, 2 β, 3 θ, 4 ρ, 5 χ, 6 ξ, 7 t′.

  // z = 0:  1 + r = α + β ;  jk(1 − r) = γ_w(α − β)
  m[0][0] = -1.0;  m[0][1] = 1.0;  m[0][2] = 1.0;
  m[1][0] = jk;    m[1][1] = gw;   m[1][2] = -gw;
  s.b[0] = 1.0;
  s.b[1] = jk;

  // z = t_w: wall 1 → object
  {
    const cplx wm = std::exp(-gw * z1), wp = std::exp(gw * z1);
    const cplx om = std::exp(-go * z1), op = std::exp(go * z1);
    m[2][1] = wm;       m[2][2] = wp;        m[2][3] = -om;       m[2][4] = -op;
    m[3][1] = gw * wm;  m[3][2] = -gw * wp;  m[3][3] = -go * om;  m[3][4] = go * op;
  }
  // z = t_w + t_o: object → wall 2
  {
    const cplx om = std::exp(-go * z2), op = std::exp(go * z2);
    const cplx wm = std::exp(-gw * z2), wp = std::exp(gw * z2);
    m[4][3] = om;       m[4][4] = op;        m[4][5] = -wm;       m[4][6] = -wp;
    m[5][3] = go * om;  m[5][4] = -go * op;  m[5][5] = -gw * wm;  m[5][6] = gw * wp;
  }
  // z = 2t_w + t_o: wall 2 → air
  {
    const cplx wm = std::exp(-gw * z3), wp = std::exp(gw * z3);
    const cplx am = std::exp(-jk * z3);
    m[6][5] = wm;       m[6][6] = wp;        m[6][7] = -am;
    m[7][5] = gw * wm;  m[7][6] = -gw * wp;  m[7][7] = -jk * am;
  }
  return s;
}

double relative_residual(const SandwichSystem& sys, const Vector8& u) {
  Vector8 res{};
  double m_norm = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    cplx acc = -sys.b[i];
    double row_sum = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
      acc += sys.m[i][k] * u[k];
      row_sum += std::abs(sys.m[i][k]);
    }
    res[i] = acc;
    m_norm = std::max(m_norm, row_sum);
  }
  return inf_norm(res) / (m_norm * inf_norm(u) + inf_norm(sys.b));
}

SandwichSolution solve_sandwich(cplx eps_w, cplx eps_o, double t_w, double t_o, double frequency_hz) {
  const SandwichSystem sys = assemble_sandwich_system(eps_w, eps_o, t_w, t_o, frequency_hz);
  for (const auto& row : sys.m)
    for (const auto& x : row)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw ConditioningError("sandwich system overflowed at " + std::to_string(frequency_hz) + " Hz",
                                frequency_hz);

  const Elimination e = eliminate(sys.m, sys.b);
  if (!(e.pivot_ratio <= kMaxPivotRatio))
    throw ConditioningError("sandwich system is numerically singular at " + std::to_string(frequency_hz) +
                                " Hz (pivot ratio " + std::to_string(e.pivot_ratio) + ")",
                            frequency_hz);
  const double residual = relative_residual(sys, e.u);
  if (!(residual <= kMaxSolveResidual))
    throw ConditioningError("sandwich solve residual " + std::to_string(residual) + " at " +
                                std::to_string(frequency_hz) + " Hz",
                            frequency_hz);

  const double z3 = 2.0 * t_w + t_o;
  const cplx t_rear = e.u[7] * std::exp(-kJ * (wavenumber(frequency_hz) * z3));
  return {e.u[0], e.u[1], e.u[2], e.u[3], e.u[4], e.u[5], e.u[6], t_rear, residual, e.pivot_ratio};
}

cplx slab_reflection(cplx eps, double thickness_m, double frequency_hz) {
  if (!std::isfinite(thickness_m) || thickness_m < 0.0) throw InvalidArgument("slab thickness must be >= 0 m");
  const double k = wavenumber(frequency_hz);
  const cplx n = refractive_index(eps);
  const cplx kw = k * n;
  const cplx phase = std::exp(-2.0 * kJ * kw * thickness_m);
  const cplx inv_n = 1.0 / n;
  const cplx num = (1.0 / eps - 1.0) * (1.0 - phase);
  const cplx den = (inv_n + 1.0) * (inv_n + 1.0) - (inv_n - 1.0) * (inv_n - 1.0) * phase;
  return num / den;
}

ComplexSpectrum slab_reflection(cplx eps, double thickness_m, const FrequencyGrid& grid) {
  ComplexSpectrum out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = slab_reflection(eps, thickness_m, grid[i]);
  return out;
}

StackResponse stack_reflection(const Stack& stack, const FrequencyGrid& grid) {
  const std::size_t nf = grid.size();
  const auto layers = stack.layers();
  std::size_t n_dielectric = layers.size();

  std::vector<cplx> refl(nf), trans(nf), half(nf), round(nf);
  std::vector<double> k(nf);
  for (std::size_t i = 0; i < nf; ++i) k[i] = wavenumber(grid[i]);

  // Index of the medium behind the current interface; air behind the stack.
  cplx n_behind{1.0, 0.0};
  if (stack.conductor_backed()) {
    --n_dielectric;
    std::fill(refl.begin(), refl.end(), cplx{-1.0, 0.0});
    std::fill(trans.begin(), trans.end(), cplx{});
  } else {
    std::fill(refl.begin(), refl.end(), cplx{});
    std::fill(trans.begin(), trans.end(), cplx{1.0, 0.0});
  }

  for (std::size_t li = n_dielectric; li-- > 0;) {
    const cplx n = refractive_index(layers[li].material.permittivity());
    if (li == n_dielectric - 1 && !stack.conductor_backed()) {
      // rear interface into air, zero-thickness step
      const cplx rho = (n - n_behind) / (n + n_behind);
      std::fill(half.begin(), half.end(), cplx{1.0, 0.0});
      std::fill(round.begin(), round.end(), cplx{1.0, 0.0});
      simd::layer_step(rho, 1.0 + rho, half, round, refl, trans);
    }
    const double d = layers[li].thickness;
    for (std::size_t i = 0; i < nf; ++i) {
      half[i] = std::exp(-kJ * (k[i] * d) * n);
      round[i] = half[i] * half[i];
    }
    const cplx n_front = li == 0 ? cplx{1.0, 0.0} : refractive_index(layers[li - 1].material.permittivity());
    const cplx rho = (n_front - n) / (n_front + n);
    simd::layer_step(rho, 1.0 + rho, half, round, refl, trans);
    n_behind = n;
  }

  return {ComplexSpectrum(grid, std::move(refl)), ComplexSpectrum(grid, std::move(trans))};
}

}  // namespace twsense
