#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace twsense {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact
inline constexpr double kInch = 0.0254;               // m, exact
inline constexpr double kPi = 3.14159265358979323846;

/// Relative permittivity of a non-magnetic medium, or a perfect-conductor marker.
///
/// Loss follows the e^{+jωt} convention: ε = ε'·(1 − j·tanδ), so a lossy medium
/// has negative imaginary permittivity.
class Material {
 public:
  enum class Kind { Dielectric, PerfectConductor };

  static Material dielectric(double eps_real, double loss_tangent = 0.0);
  static Material perfect_conductor() { return Material(Kind::PerfectConductor, 0.0, 0.0); }
  static Material air() { return dielectric(1.0, 0.0); }

  Kind kind() const noexcept { return kind_; }
  bool is_conductor() const noexcept { return kind_ == Kind::PerfectConductor; }

  // Both throw Unsupported for a perfect conductor.
  double eps_real() const;
  double loss_tangent() const;
  cplx permittivity() const;

  friend bool operator==(const Material&, const Material&) = default;

 private:
  Material(Kind kind, double eps_real, double loss_tangent)
      : kind_(kind), eps_real_(eps_real), loss_tangent_(loss_tangent) {}

  Kind kind_;
  double eps_real_;
  double loss_tangent_;
};

struct Layer {
  Layer(Material material, double thickness_m);

  Material material;
  double thickness;  // m
};

/// Ordered slabs between two air half-spaces, front (z = 0) to back.
/// A perfect conductor may only appear as the last layer.
class Stack {
 public:
  explicit Stack(std::vector<Layer> layers);

  std::span<const Layer> layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return layers_.size(); }
  bool conductor_backed() const noexcept { return layers_.back().material.is_conductor(); }
  double total_thickness() const noexcept;

 private:
  std::vector<Layer> layers_;
};

/// Stepped-frequency sweep. Points are stored explicitly so that spectra
/// read from files keep the exact frequencies they were written with.
class FrequencyGrid {
 public:
  /// Evenly spaced, endpoints inclusive. count == 1 yields {start}.
  static FrequencyGrid linear(double start_hz, double stop_hz, std::size_t count);
  /// Arbitrary strictly increasing positive points.
  static FrequencyGrid from_points(std::vector<double> points_hz);

  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const noexcept { return points_[i]; }
  std::span<const double> points() const noexcept { return points_; }
  double front() const noexcept { return points_.front(); }
  double back() const noexcept { return points_.back(); }

  /// Same length and every point equal to within `rel_tol`.
  bool matches(const FrequencyGrid& other, double rel_tol = 1e-12) const noexcept;

 private:
  explicit FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {}
  std::vector<double> points_;
};

/// Complex values on a FrequencyGrid with an optional per-point validity mask.
class ComplexSpectrum {
 public:
  explicit ComplexSpectrum(FrequencyGrid grid);
  ComplexSpectrum(FrequencyGrid grid, std::vector<cplx> values);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }

  bool is_valid(std::size_t i) const noexcept { return valid_.empty() || valid_[i] != 0; }
  void set_valid(std::size_t i, bool valid);
  bool all_valid() const noexcept;
  std::size_t valid_count() const noexcept;

 private:
  FrequencyGrid grid_;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> valid_;  // empty: every point valid
};

/// Free-space wavenumber 2πf/c₀ in rad/m.
double wavenumber(double frequency_hz);

/// γ = j·k·√ε with Re γ ≥ 0 (and Im γ > 0 when lossless), so e^{−γz} decays along +z.
cplx propagation_constant(const Material& m, double frequency_hz);
cplx propagation_constant(cplx eps, double frequency_hz);

/// Refractive index √ε on the branch matching propagation_constant.
cplx refractive_index(cplx eps);

}  // namespace twsense
