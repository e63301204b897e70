#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twsense/em_core.hpp"

namespace twsense {

struct FitStart {
  double eps_real;
  double loss_tangent;
};

enum class FitStop { GradientSmall, StepSmall, NoDecrease, MaxIterations };

struct FitResult {
  double eps_real = 0.0;
  double loss_tangent = 0.0;
  double residual_rms = 0.0;  // RMS of |r_model − r_meas| over valid points
  double gradient_norm = 0.0; // projected ∞-norm at the returned point
  int iterations = 0;
  bool converged = false;
  FitStop stop = FitStop::MaxIterations;
  FitStart start_point_used{};

  Material material() const { return Material::dielectric(eps_real, loss_tangent); }
};

struct FitOptions {
  double fd_relative_step = 1e-6;
  double step_tolerance = 1e-10;      // relative parameter step
  double gradient_tolerance = 1e-12;  // ∞-norm of the projected gradient
  int max_iterations = 200;
  double min_eps_real = 1.0 + 1e-6;
  // Before local refinement, scan ε′ on a grid fine enough to resolve fringe
  // orders and add the deepest minima as extra starts.
  bool fringe_scan = true;
  std::size_t fringe_scan_seeds = 4;
  // Called after every accepted step with (iteration, objective).
  std::function<void(int, double)> on_accept;
};

inline constexpr std::size_t kMinFitPoints = 8;

/// ε′ ∈ {2, 4, 8, 12, 16, 25} × tanδ ∈ {0.001, 0.01, 0.1}.
std::vector<FitStart> default_fit_starts();

/// Least-squares fit of the closed-form slab reflection to a measured spectrum
/// over (ε′, tanδ), by Levenberg–Marquardt from each start; returns the lowest
/// residual. Throws InsufficientData (< kMinFitPoints valid points) or
/// NonConvergence (no start converged).
FitResult fit_slab_permittivity(const ComplexSpectrum& r_meas, double thickness_m,
                                const std::vector<FitStart>& starts = default_fit_starts(),
                                const FitOptions& options = {});

/// Central-difference Jacobian of the stacked residual [Re; Im](r_model − r_meas)
/// with respect to (ε′, tanδ), row-major 2M×2. Exposed for verification.
std::vector<double> slab_fit_jacobian(std::span<const double> freqs_hz, double thickness_m, double eps_real,
                                      double loss_tangent, double relative_step = 1e-6);

/// Pointwise s_a − s_ref; invalid wherever either input is.
ComplexSpectrum contrast_spectrum(const ComplexSpectrum& s_a, const ComplexSpectrum& s_ref);

struct SandwichGeometry {
  Material wall;
  double wall_thickness;    // m
  double object_thickness;  // m
};

/// wall/object/wall, or wall/object when the object is a perfect conductor.
Stack sandwich_stack(const SandwichGeometry& geometry, const Material& object);

struct NamedMaterial {
  std::string name;
  Material material;
};

struct RankedCandidate {
  std::string name;
  double misfit;  // RMS |r_sim − r_meas| over valid points
};

/// Candidates sorted by ascending misfit; ties keep the input order.
std::vector<RankedCandidate> rank_materials(const ComplexSpectrum& r_meas, const std::vector<NamedMaterial>& candidates,
                                            const SandwichGeometry& geometry);

struct RangeBudget {
  RangeBudget(double p_t_w, double p_d_min_w, double gain_linear, double wavelength_m);

  double p_t;
  double p_d_min;
  double gain;
  double wavelength;
};

/// R = (λG / 4π)·√(P_t / P_d,min).
double friis_range(const RangeBudget& budget);

}  // namespace twsense
