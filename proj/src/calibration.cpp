#include "twsense/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "twsense/errors.hpp"
#include "twsense/kernels.hpp"

namespace twsense {

CalibrationSet::CalibrationSet(ComplexSpectrum raw, ComplexSpectrum background, ComplexSpectrum metal)
    : raw_(std::move(raw)), background_(std::move(background)), metal_(std::move(metal)) {
  if (!raw_.grid().matches(background_.grid()) || !raw_.grid().matches(metal_.grid()))
    throw InvalidArgument("raw, background and metal spectra must share one frequency grid");
}

InstrumentModel::InstrumentModel(ComplexSpectrum incident_, ComplexSpectrum background_reflection_,
                                 ComplexSpectrum transfer_, double noise_level_)
    : incident(std::move(incident_)),
      background_reflection(std::move(background_reflection_)),
      transfer(std::move(transfer_)),
      noise_level(noise_level_) {
  if (!incident.grid().matches(background_reflection.grid()) || !incident.grid().matches(transfer.grid()))
    throw InvalidArgument("instrument model spectra must share one frequency grid");
  if (!std::isfinite(noise_level) || noise_level < 0.0)
    throw InvalidArgument("noise_level must be finite and >= 0");
}

ComplexSpectrum apply_calibration(const CalibrationSet& cal, double relative_threshold) {
  const std::size_t n = cal.grid().size();
  ComplexSpectrum out(cal.grid());
  std::vector<double> denom_abs2(n);
  simd::calibration_quotient(cal.raw().values(), cal.background().values(), cal.metal().values(), out.values(),
                             denom_abs2);

  double max_abs2 = 0.0;
  for (double d : denom_abs2)
    if (std::isfinite(d)) max_abs2 = std::max(max_abs2, d);
  // Compare squared magnitudes against the squared threshold.
  const double cutoff = relative_threshold * relative_threshold * max_abs2;

  std::size_t good = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = cal.raw().is_valid(i) && cal.background().is_valid(i) && cal.metal().is_valid(i) &&
                    max_abs2 > 0.0 && denom_abs2[i] >= cutoff && std::isfinite(out[i].real()) &&
                    std::isfinite(out[i].imag());
    out.set_valid(i, ok);
    good += ok ? 1 : 0;
  }
  if (good == 0) throw DegenerateCalibration("calibration is degenerate: background and metal references coincide");
  return out;
}

CalibrationSet synthesize_measurement(const ComplexSpectrum& r_true, const InstrumentModel& model,
                                      std::uint64_t seed) {
  if (!r_true.grid().matches(model.incident.grid()))
    throw InvalidArgument("reflection spectrum and instrument model are on different grids");
  const std::size_t n = r_true.size();
  ComplexSpectrum raw(r_true.grid()), background(r_true.grid()), metal(r_true.grid());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = model.noise_level;
  auto noise = [&]() -> cplx {
    if (sigma == 0.0) return {};
    const double re = gauss(rng);
    const double im = gauss(rng);
    return {sigma * re, sigma * im};
  };

  for (std::size_t i = 0; i < n; ++i) {
    const cplx scale = model.incident[i] * model.transfer[i];
    const cplx rb = model.background_reflection[i];
    raw[i] = scale * (rb + r_true[i]) + noise();
    background[i] = scale * rb + noise();
    metal[i] = scale * (rb - 1.0) + noise();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!r_true.is_valid(i)) raw.set_valid(i, false);
  }
  return CalibrationSet(std::move(raw), std::move(background), std::move(metal));
}

}  // namespace twsense
