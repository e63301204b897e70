#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "twsense/calibration.hpp"
#include "twsense/em_core.hpp"
#include "twsense/inversion.hpp"

namespace twsense {

/// Smooth instrument response m·e^{jφ}·e^{−j2πfτ}.
struct ToneSpec {
  double magnitude = 1.0;
  double phase_deg = 0.0;
  double delay_s = 0.0;

  ComplexSpectrum on(const FrequencyGrid& grid) const;
};

struct InstrumentSpec {
  ToneSpec incident;
  ToneSpec background{0.0, 0.0, 0.0};
  ToneSpec transfer;
  double noise_level = 0.0;

  InstrumentModel model(const FrequencyGrid& grid) const;
};

struct Scenario {
  std::string name;
  Stack stack;
  FrequencyGrid grid;
  std::optional<InstrumentSpec> instrument;
  std::vector<NamedMaterial> candidates;
  double range_m = 0.0;
  bool apply_range_phase = false;

  /// Wall = first layer, object = second layer. Requires wall/object/wall with
  /// matching walls, or wall/conductor.
  SandwichGeometry sandwich_geometry() const;
};

/// Built-in materials: air, cement (ε′ 12.4, tanδ 0.003), water (77, 0), metal
/// (perfect conductor), and placeholder soil (4, 0.05) and rock (6, 0.02).
std::optional<Material> material_preset(const std::string& name);
std::vector<std::string> material_preset_names();

/// JSON scenario. Quantities are SI numbers or strings with units ("1.4 in",
/// "26.5 GHz"). Unknown keys are rejected. Throws ParseError / InvalidArgument.
Scenario parse_scenario(const std::string& json_text, const std::string& source = "<scenario>");

/// Loads a file, or one of the built-in names ("default-sandwich", "wall-block")
/// when no such file exists.
Scenario load_scenario(const std::string& path_or_name);

/// JSON text of a built-in scenario, or empty.
std::string builtin_scenario_text(const std::string& name);

/// Applies the optional range phase e^{−j2kR} to a front-face reflection spectrum.
ComplexSpectrum apply_range_phase(const ComplexSpectrum& r, double range_m);

}  // namespace twsense
