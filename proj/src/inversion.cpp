#include "twsense/inversion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "twsense/errors.hpp"
#include "twsense/forward_solver.hpp"
#include "twsense/kernels.hpp"

namespace twsense {

namespace {

struct Params {
  double eps_real;
  double loss_tangent;
};

cplx permittivity_of(const Params& p) { return p.eps_real * cplx(1.0, -p.loss_tangent); }

void model_into(std::span<const double> freqs, double thickness, const Params& p, std::span<cplx> out) {
  const cplx eps = permittivity_of(p);
  for (std::size_t i = 0; i < freqs.size(); ++i) out[i] = slab_reflection(eps, thickness, freqs[i]);
}

double fd_step(double value, double relative_step) { return relative_step * std::max(std::abs(value), 1.0); }

class SlabProblem {
 public:
  SlabProblem(std::vector<double> freqs, std::vector<cplx> meas, double thickness, const FitOptions& opt)
      : freqs_(std::move(freqs)), meas_(std::move(meas)), thickness_(thickness), opt_(opt), work_(freqs_.size()),
        plus_(freqs_.size()), minus_(freqs_.size()) {}

  std::size_t points() const noexcept { return freqs_.size(); }

  Params clamp(Params p) const {
    p.eps_real = std::max(p.eps_real, opt_.min_eps_real);
    p.loss_tangent = std::max(p.loss_tangent, 0.0);
    return p;
  }

  double objective(const Params& p) {
    model_into(freqs_, thickness_, p, work_);
    return simd::sum_abs2_diff(work_, meas_);
  }

  // Normal equations of the stacked real residual: A = JᵀJ, g = Jᵀres.
  void normal_equations(const Params& p, std::array<double, 4>& a, std::array<double, 2>& g) {
    model_into(freqs_, thickness_, p, work_);
    a.fill(0.0);
    g.fill(0.0);
    std::array<std::vector<cplx>, 2> cols;
    for (int j = 0; j < 2; ++j) {
      Params hi = p, lo = p;
      double& hv = j == 0 ? hi.eps_real : hi.loss_tangent;
      double& lv = j == 0 ? lo.eps_real : lo.loss_tangent;
      const double h = fd_step(j == 0 ? p.eps_real : p.loss_tangent, opt_.fd_relative_step);
      hv += h;
      lv -= h;
      model_into(freqs_, thickness_, hi, plus_);
      model_into(freqs_, thickness_, lo, minus_);
      cols[j].resize(points());
      for (std::size_t i = 0; i < points(); ++i) cols[j][i] = (plus_[i] - minus_[i]) / (2.0 * h);
    }
    for (std::size_t i = 0; i < points(); ++i) {
      const cplx res = work_[i] - meas_[i];
      for (int j = 0; j < 2; ++j) {
        // Re/Im rows contribute Re(conj(a)·b) to every inner product.
        g[j] += cols[j][i].real() * res.real() + cols[j][i].imag() * res.imag();
        for (int l = 0; l < 2; ++l)
          a[2 * j + l] += cols[j][i].real() * cols[l][i].real() + cols[j][i].imag() * cols[l][i].imag();
      }
    }
  }

  FitResult levenberg_marquardt(const FitStart& start) {
    FitResult out;
    out.start_point_used = start;
    Params p = clamp({start.eps_real, start.loss_tangent});
    double f = objective(p);
    double lambda = 1e-3;
    std::array<double, 4> a{};
    std::array<double, 2> g{};

    auto finish = [&](FitStop stop, int iters, double gnorm) {
      out.eps_real = p.eps_real;
      out.loss_tangent = p.loss_tangent;
      out.residual_rms = std::sqrt(f / static_cast<double>(points()));
      out.iterations = iters;
      out.gradient_norm = gnorm;
      out.stop = stop;
      out.converged = stop != FitStop::MaxIterations;
      return out;
    };

    for (int iter = 1; iter <= opt_.max_iterations; ++iter) {
      normal_equations(p, a, g);
      // Parameters pinned at a bound with the gradient pushing outward stay fixed.
      const std::array<bool, 2> pinned{p.eps_real <= opt_.min_eps_real && g[0] > 0.0,
                                       p.loss_tangent <= 0.0 && g[1] > 0.0};
      double gnorm = 0.0;
      for (int j = 0; j < 2; ++j)
        if (!pinned[j]) gnorm = std::max(gnorm, 2.0 * std::abs(g[j]));
      if (gnorm < opt_.gradient_tolerance) return finish(FitStop::GradientSmall, iter - 1, gnorm);

      for (;;) {
        std::array<double, 2> delta{0.0, 0.0};
        const double d0 = a[0] * (1.0 + lambda) + 1e-300, d1 = a[3] * (1.0 + lambda) + 1e-300;
        if (pinned[0] && pinned[1]) {
          return finish(FitStop::GradientSmall, iter - 1, gnorm);
        } else if (pinned[0]) {
          delta[1] = -g[1] / d1;
        } else if (pinned[1]) {
          delta[0] = -g[0] / d0;
        } else {
          const double det = d0 * d1 - a[1] * a[2];
          delta[0] = -(d1 * g[0] - a[1] * g[1]) / det;
          delta[1] = -(d0 * g[1] - a[2] * g[0]) / det;
        }
        const Params trial = clamp({p.eps_real + delta[0], p.loss_tangent + delta[1]});
        const double step = std::hypot(trial.eps_real - p.eps_real, trial.loss_tangent - p.loss_tangent);
        const double scale = std::hypot(p.eps_real, p.loss_tangent);
        if (step <= opt_.step_tolerance * (scale + opt_.step_tolerance))
          return finish(FitStop::StepSmall, iter, gnorm);
        const double f_trial = objective(trial);
        if (f_trial < f) {
          p = trial;
          f = f_trial;
          lambda = std::max(lambda * 0.1, 1e-15);
          if (opt_.on_accept) opt_.on_accept(iter, f);
          break;
        }
        lambda *= 10.0;
        if (lambda > 1e16) return finish(FitStop::NoDecrease, iter, gnorm);
      }
    }
    normal_equations(p, a, g);
    return finish(FitStop::MaxIterations, opt_.max_iterations, 2.0 * std::max(std::abs(g[0]), std::abs(g[1])));
  }

  // Deepest local minima of the objective along ε′ on a fringe-resolving grid.
  std::vector<FitStart> fringe_scan_seeds(const std::vector<FitStart>& starts) {
    double eps_hi = 25.0;
    std::vector<double> tans{0.0};
    for (const auto& s : starts) {
      eps_hi = std::max(eps_hi, 1.3 * s.eps_real);
      if (std::find(tans.begin(), tans.end(), s.loss_tangent) == tans.end()) tans.push_back(s.loss_tangent);
    }
    const double lambda_min = kSpeedOfLight / freqs_.back();
    const double n_lo = std::sqrt(opt_.min_eps_real), n_hi = std::sqrt(eps_hi);
    const double dn = lambda_min / (8.0 * thickness_);
    const auto count = static_cast<std::size_t>(std::clamp((n_hi - n_lo) / dn, 16.0, 20000.0)) + 1;

    struct Candidate {
      double objective;
      FitStart start;
    };
    std::vector<Candidate> minima;
    std::vector<double> profile(count);
    for (double tan_d : tans) {
      for (std::size_t i = 0; i < count; ++i) {
        const double n = n_lo + (n_hi - n_lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        profile[i] = objective({n * n, tan_d});
      }
      for (std::size_t i = 0; i < count; ++i) {
        const bool left = i == 0 || profile[i] <= profile[i - 1];
        const bool right = i + 1 == count || profile[i] <= profile[i + 1];
        if (left && right) {
          const double n = n_lo + (n_hi - n_lo) * static_cast<double>(i) / static_cast<double>(count - 1);
          minima.push_back({profile[i], {std::max(n * n, opt_.min_eps_real), tan_d}});
        }
      }
    }
    std::sort(minima.begin(), minima.end(),
              [](const Candidate& x, const Candidate& y) { return x.objective < y.objective; });
    std::vector<FitStart> seeds;
    for (std::size_t i = 0; i < minima.size() && seeds.size() < opt_.fringe_scan_seeds; ++i)
      seeds.push_back(minima[i].start);
    return seeds;
  }

 private:
  std::vector<double> freqs_;
  std::vector<cplx> meas_;
  double thickness_;
  const FitOptions& opt_;
  std::vector<cplx> work_, plus_, minus_;
};

}  // namespace

std::vector<FitStart> default_fit_starts() {
  std::vector<FitStart> starts;
  for (double e : {2.0, 4.0, 8.0, 12.0, 16.0, 25.0})
    for (double t : {0.001, 0.01, 0.1}) starts.push_back({e, t});
  return starts;
}

FitResult fit_slab_permittivity(const ComplexSpectrum& r_meas, double thickness_m,
                                const std::vector<FitStart>& starts, const FitOptions& options) {
  if (!std::isfinite(thickness_m) || thickness_m <= 0.0) throw InvalidArgument("slab thickness must be > 0 m");
  if (starts.empty()) throw InvalidArgument("at least one start point is required");
  for (const auto& s : starts) {
    if (!(s.eps_real > 1.0) || !std::isfinite(s.eps_real) || !(s.loss_tangent >= 0.0) ||
        !std::isfinite(s.loss_tangent))
      throw InvalidArgument("start points need eps_real > 1 and loss_tangent >= 0");
  }

  std::vector<double> freqs;
  std::vector<cplx> meas;
  for (std::size_t i = 0; i < r_meas.size(); ++i) {
    if (!r_meas.is_valid(i)) continue;
    freqs.push_back(r_meas.grid()[i]);
    meas.push_back(r_meas[i]);
  }
  if (freqs.size() < kMinFitPoints)
    throw InsufficientData("permittivity fit needs at least " + std::to_string(kMinFitPoints) +
                           " valid points, got " + std::to_string(freqs.size()));

  SlabProblem problem(std::move(freqs), std::move(meas), thickness_m, options);
  std::vector<FitStart> all = starts;
  if (options.fringe_scan) {
    const auto seeds = problem.fringe_scan_seeds(starts);
    all.insert(all.end(), seeds.begin(), seeds.end());
  }

  FitResult best;
  bool have_best = false;
  double best_any = std::numeric_limits<double>::infinity();
  for (const auto& s : all) {
    const FitResult r = problem.levenberg_marquardt(s);
    best_any = std::min(best_any, r.residual_rms);
    if (!r.converged) continue;
    if (!have_best || r.residual_rms < best.residual_rms) {
      best = r;
      have_best = true;
    }
  }
  if (!have_best) throw NonConvergence("no start point converged", best_any);
  return best;
}

std::vector<double> slab_fit_jacobian(std::span<const double> freqs_hz, double thickness_m, double eps_real,
                                      double loss_tangent, double relative_step) {
  const std::size_t m = freqs_hz.size();
  std::vector<double> jac(4 * m);
  std::vector<cplx> plus(m), minus(m);
  for (int j = 0; j < 2; ++j) {
    Params hi{eps_real, loss_tangent}, lo{eps_real, loss_tangent};
    const double h = fd_step(j == 0 ? eps_real : loss_tangent, relative_step);
    (j == 0 ? hi.eps_real : hi.loss_tangent) += h;
    (j == 0 ? lo.eps_real : lo.loss_tangent) -= h;
    model_into(freqs_hz, thickness_m, hi, plus);
    model_into(freqs_hz, thickness_m, lo, minus);
    for (std::size_t i = 0; i < m; ++i) {
      const cplx d = (plus[i] - minus[i]) / (2.0 * h);
      jac[2 * i + j] = d.real();
      jac[2 * (m + i) + j] = d.imag();
    }
  }
  return jac;
}

ComplexSpectrum contrast_spectrum(const ComplexSpectrum& s_a, const ComplexSpectrum& s_ref) {
  if (!s_a.grid().matches(s_ref.grid())) throw InvalidArgument("contrast operands are on different frequency grids");
  ComplexSpectrum out(s_a.grid());
  simd::subtract(s_a.values(), s_ref.values(), out.values());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!s_a.is_valid(i) || !s_ref.is_valid(i)) out.set_valid(i, false);
  return out;
}

Stack sandwich_stack(const SandwichGeometry& g, const Material& object) {
  if (g.wall.is_conductor()) throw InvalidArgument("wall material cannot be a perfect conductor");
  std::vector<Layer> layers{Layer(g.wall, g.wall_thickness), Layer(object, g.object_thickness)};
  if (!object.is_conductor()) layers.emplace_back(g.wall, g.wall_thickness);
  return Stack(std::move(layers));
}

std::vector<RankedCandidate> rank_materials(const ComplexSpectrum& r_meas, const std::vector<NamedMaterial>& candidates,
                                            const SandwichGeometry& geometry) {
  if (candidates.empty()) throw InvalidArgument("rank_materials needs at least one candidate");
  std::vector<std::size_t> idx;
  std::vector<cplx> meas;
  for (std::size_t i = 0; i < r_meas.size(); ++i) {
    if (r_meas.is_valid(i)) {
      idx.push_back(i);
      meas.push_back(r_meas[i]);
    }
  }
  if (idx.empty()) throw InsufficientData("measured spectrum has no valid points");

  std::vector<RankedCandidate> ranked;
  std::vector<cplx> sim(idx.size());
  for (const auto& c : candidates) {
    const StackResponse resp = stack_reflection(sandwich_stack(geometry, c.material), r_meas.grid());
    for (std::size_t k = 0; k < idx.size(); ++k) sim[k] = resp.r[idx[k]];
    const double misfit = std::sqrt(simd::sum_abs2_diff(sim, meas) / static_cast<double>(idx.size()));
    ranked.push_back({c.name, misfit});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) { return a.misfit < b.misfit; });
  return ranked;
}

RangeBudget::RangeBudget(double p_t_w, double p_d_min_w, double gain_linear, double wavelength_m)
    : p_t(p_t_w), p_d_min(p_d_min_w), gain(gain_linear), wavelength(wavelength_m) {
  for (double v : {p_t, p_d_min, gain, wavelength})
    if (!std::isfinite(v) || v <= 0.0) throw InvalidArgument("range budget terms must be finite and > 0");
}

double friis_range(const RangeBudget& b) {
  return b.wavelength * b.gain / (4.0 * kPi) * std::sqrt(b.p_t / b.p_d_min);
}

}  // namespace twsense
