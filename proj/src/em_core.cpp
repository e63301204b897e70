#include "twsense/em_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twsense/errors.hpp"

namespace twsense {

Material Material::dielectric(double eps_real, double loss_tangent) {
  if (!std::isfinite(eps_real) || eps_real <= 0.0)
    throw InvalidArgument("dielectric eps_real must be finite and > 0, got " + std::to_string(eps_real));
  if (!std::isfinite(loss_tangent) || loss_tangent < 0.0)
    throw InvalidArgument("loss_tangent must be finite and >= 0, got " + std::to_string(loss_tangent));
  return Material(Kind::Dielectric, eps_real, loss_tangent);
}

double Material::eps_real() const {
  if (is_conductor()) throw Unsupported("perfect conductor has no permittivity");
  return eps_real_;
}

double Material::loss_tangent() const {
  if (is_conductor()) throw Unsupported("perfect conductor has no permittivity");
  return loss_tangent_;
}

cplx Material::permittivity() const {
  if (is_conductor()) throw Unsupported("perfect conductor has no permittivity");
  return eps_real_ * cplx(1.0, -loss_tangent_);
}

Layer::Layer(Material m, double thickness_m) : material(m), thickness(thickness_m) {
  if (!std::isfinite(thickness_m) || thickness_m <= 0.0)
    throw InvalidArgument("layer thickness must be finite and > 0 m, got " + std::to_string(thickness_m));
}

Stack::Stack(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("stack must contain at least one layer");
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    if (layers_[i].material.is_conductor())
      throw InvalidArgument("perfect-conductor layer must be the last layer of the stack (found at position " +
                            std::to_string(i) + " of " + std::to_string(layers_.size()) + ")");
  }
}

double Stack::total_thickness() const noexcept {
  double sum = 0.0;
  for (const auto& l : layers_) sum += l.thickness;
  return sum;
}

FrequencyGrid FrequencyGrid::linear(double start_hz, double stop_hz, std::size_t count) {
  if (!std::isfinite(start_hz) || start_hz <= 0.0) throw InvalidArgument("grid start must be > 0 Hz");
  if (!std::isfinite(stop_hz) || stop_hz <= start_hz) throw InvalidArgument("grid stop must exceed start");
  if (count < 1) throw InvalidArgument("grid count must be >= 1");
  std::vector<double> pts(count);
  if (count == 1) {
    pts[0] = start_hz;
  } else {
    const double step = (stop_hz - start_hz) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) pts[i] = start_hz + step * static_cast<double>(i);
    pts.back() = stop_hz;
  }
  return FrequencyGrid(std::move(pts));
}

FrequencyGrid FrequencyGrid::from_points(std::vector<double> points_hz) {
  if (points_hz.empty()) throw InvalidArgument("frequency grid must be non-empty");
  for (std::size_t i = 0; i < points_hz.size(); ++i) {
    if (!std::isfinite(points_hz[i]) || points_hz[i] <= 0.0)
      throw InvalidArgument("frequency points must be finite and > 0 (index " + std::to_string(i) + ")");
    if (i > 0 && !(points_hz[i] > points_hz[i - 1]))
      throw InvalidArgument("frequency points must be strictly increasing (index " + std::to_string(i) + ")");
  }
  return FrequencyGrid(std::move(points_hz));
}

bool FrequencyGrid::matches(const FrequencyGrid& other, double rel_tol) const noexcept {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(points_[i] - other.points_[i]) > rel_tol * std::abs(points_[i])) return false;
  }
  return true;
}

ComplexSpectrum::ComplexSpectrum(FrequencyGrid grid) : grid_(std::move(grid)), values_(grid_.size()) {}

ComplexSpectrum::ComplexSpectrum(FrequencyGrid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("spectrum has " + std::to_string(values_.size()) + " values for a " +
                          std::to_string(grid_.size()) + "-point grid");
}

void ComplexSpectrum::set_valid(std::size_t i, bool valid) {
  if (valid_.empty()) {
    if (valid) return;
    valid_.assign(values_.size(), 1);
  }
  valid_[i] = valid ? 1 : 0;
}

bool ComplexSpectrum::all_valid() const noexcept {
  return std::all_of(valid_.begin(), valid_.end(), [](std::uint8_t v) { return v != 0; });
}

std::size_t ComplexSpectrum::valid_count() const noexcept {
  if (valid_.empty()) return values_.size();
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

double wavenumber(double frequency_hz) {
  if (!std::isfinite(frequency_hz) || frequency_hz <= 0.0)
    throw InvalidArgument("frequency must be finite and > 0 Hz, got " + std::to_string(frequency_hz));
  return 2.0 * kPi * frequency_hz / kSpeedOfLight;
}

cplx refractive_index(cplx eps) {
  // Principal branch. For passive media (Im ε <= 0) it has Im n <= 0, hence Re γ >= 0.
  // It stays analytic across Im ε = 0, which the finite-difference fit Jacobian relies on.
  return std::sqrt(eps);
}

cplx propagation_constant(cplx eps, double frequency_hz) {
  const double k = wavenumber(frequency_hz);
  return cplx(0.0, k) * refractive_index(eps);
}

cplx propagation_constant(const Material& m, double frequency_hz) {
  if (m.is_conductor())
    throw Unsupported("perfect conductor is a reflecting boundary, not a propagation medium");
  return propagation_constant(m.permittivity(), frequency_hz);
}

}  // namespace twsense
