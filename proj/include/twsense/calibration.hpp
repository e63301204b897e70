#pragma once

#include <cstdint>

#include "twsense/em_core.hpp"

namespace twsense {

/// Raw target, empty-scene background, and metal-plate reference on one grid.
class CalibrationSet {
 public:
  CalibrationSet(ComplexSpectrum raw, ComplexSpectrum background, ComplexSpectrum metal);

  const ComplexSpectrum& raw() const noexcept { return raw_; }
  const ComplexSpectrum& background() const noexcept { return background_; }
  const ComplexSpectrum& metal() const noexcept { return metal_; }
  const FrequencyGrid& grid() const noexcept { return raw_.grid(); }

 private:
  ComplexSpectrum raw_, background_, metal_;
};

/// Forward model of the measurement chain: S = E_i·(r_b + r)·T, plus additive
/// complex Gaussian noise of standard deviation `noise_level` on each of the
/// real and imaginary parts.
struct InstrumentModel {
  InstrumentModel(ComplexSpectrum incident, ComplexSpectrum background_reflection, ComplexSpectrum transfer,
                  double noise_level);

  ComplexSpectrum incident;
  ComplexSpectrum background_reflection;
  ComplexSpectrum transfer;
  double noise_level;
};

inline constexpr double kDefaultCalibrationThreshold = 1e-9;

/// r = (S − S_b) / (S_b − S_m) per point. Points whose |S_b − S_m| falls below
/// `relative_threshold`·max|S_b − S_m| (or that are invalid in any input) come
/// back flagged invalid. Throws DegenerateCalibration if no point survives.
ComplexSpectrum apply_calibration(const CalibrationSet& cal,
                                  double relative_threshold = kDefaultCalibrationThreshold);

/// Runs the measurement model forward for a known reflection spectrum; the
/// metal plate is an ideal r = −1 reflector. Deterministic for a given seed.
CalibrationSet synthesize_measurement(const ComplexSpectrum& r_true, const InstrumentModel& model,
                                      std::uint64_t seed);

}  // namespace twsense
