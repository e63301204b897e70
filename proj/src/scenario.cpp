#include "twsense/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include "json.hpp"
#include "twsense/errors.hpp"
#include "twsense/units.hpp"

namespace twsense {

namespace {

using nlohmann::json;

const char* const kDefaultSandwich = R"({
  "name": "default-sandwich",
  "description": "cement / water / cement: two 1.4 in walls with a 7 in gap, swept over Ka band",
  "grid": {"start": "26.5 GHz", "stop": "40 GHz", "count": 1601},
  "layers": [
    {"material": "cement", "thickness": "1.4 in"},
    {"material": "water", "thickness": "7 in"},
    {"material": "cement", "thickness": "1.4 in"}
  ],
  "range": {"distance": "30 in", "apply_phase": false},
  "instrument": {
    "incident": {"magnitude": 1.0},
    "background": {"magnitude": 0.05, "phase_deg": 40.0, "delay_ns": 0.4},
    "transfer": {"magnitude": 0.3, "phase_deg": -20.0, "delay_ns": 6.2},
    "noise_level": 0.0
  },
  "candidates": ["water", "soil", "rock", "metal", "air"]
}
)";

const char* const kWallBlock = R"({
  "name": "wall-block",
  "description": "single 1.4 in cement block, 101 points over Ka band, for permittivity characterization",
  "grid": {"start": "26.5 GHz", "stop": "40 GHz", "count": 101},
  "layers": [
    {"material": "cement", "thickness": "1.4 in"}
  ],
  "instrument": {
    "incident": {"magnitude": 1.0},
    "background": {"magnitude": 0.05, "phase_deg": 40.0, "delay_ns": 0.4},
    "transfer": {"magnitude": 0.3, "phase_deg": -20.0, "delay_ns": 6.2},
    "noise_level": 0.0
  }
}
)";

class Reader {
 public:
  explicit Reader(const std::string& source) : source_(source) {}

  [[noreturn]] void fail(const std::string& where, const std::string& msg) const {
    throw InvalidArgument(source_ + ": " + where + ": " + msg);
  }

  void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        fail(where, "unknown key '" + key + "'");
    }
  }

  double number(const json& v, const std::string& where) const {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
  }

  double quantity(const json& v, Quantity q, const std::string& where) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_quantity(v.get<std::string>(), q);
      } catch (const InvalidArgument& e) {
        fail(where, e.what());
      }
    }
    fail(where, "expected a number or a string with units");
  }

  Material material_def(const json& obj, const std::string& where) const {
    check_keys(obj, where, {"kind", "eps_real", "loss_tangent", "note"});
    const std::string kind = obj.value("kind", std::string("dielectric"));
    try {
      if (kind == "perfect-conductor") {
        if (obj.contains("eps_real") || obj.contains("loss_tangent"))
          fail(where, "a perfect conductor carries no permittivity");
        return Material::perfect_conductor();
      }
      if (kind != "dielectric") fail(where, "kind must be 'dielectric' or 'perfect-conductor'");
      if (!obj.contains("eps_real")) fail(where, "missing 'eps_real'");
      const double tan_d = obj.contains("loss_tangent") ? number(obj["loss_tangent"], where + ".loss_tangent") : 0.0;
      return Material::dielectric(number(obj["eps_real"], where + ".eps_real"), tan_d);
    } catch (const InvalidArgument& e) {
      if (std::string(e.what()).rfind(source_, 0) == 0) throw;
      fail(where, e.what());
    }
  }

  ToneSpec tone(const json& obj, const std::string& where) const {
    check_keys(obj, where, {"magnitude", "phase_deg", "delay_ns"});
    ToneSpec t;
    if (obj.contains("magnitude")) t.magnitude = number(obj["magnitude"], where + ".magnitude");
    if (obj.contains("phase_deg")) t.phase_deg = number(obj["phase_deg"], where + ".phase_deg");
    if (obj.contains("delay_ns")) t.delay_s = number(obj["delay_ns"], where + ".delay_ns") * 1e-9;
    if (!std::isfinite(t.magnitude) || !std::isfinite(t.phase_deg) || !std::isfinite(t.delay_s))
      fail(where, "values must be finite");
    return t;
  }

 private:
  const std::string& source_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

ComplexSpectrum ToneSpec::on(const FrequencyGrid& grid) const {
  ComplexSpectrum s(grid);
  const cplx base = std::polar(magnitude, phase_deg * kPi / 180.0);
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = base * std::polar(1.0, -2.0 * kPi * grid[i] * delay_s);
  return s;
}

InstrumentModel InstrumentSpec::model(const FrequencyGrid& grid) const {
  return InstrumentModel(incident.on(grid), background.on(grid), transfer.on(grid), noise_level);
}

SandwichGeometry Scenario::sandwich_geometry() const {
  const auto layers = stack.layers();
  const bool three = layers.size() == 3 && layers[0].material == layers[2].material &&
                     layers[0].thickness == layers[2].thickness && !layers[1].material.is_conductor();
  const bool backed = layers.size() == 2 && layers[1].material.is_conductor();
  if (!three && !backed)
    throw InvalidArgument("scenario '" + name + "' is not a wall/object/wall sandwich with identical walls");
  return {layers[0].material, layers[0].thickness, layers[1].thickness};
}

std::optional<Material> material_preset(const std::string& name) {
  if (name == "air") return Material::air();
  if (name == "cement") return Material::dielectric(12.4, 0.003);
  if (name == "water") return Material::dielectric(77.0, 0.0);
  if (name == "metal") return Material::perfect_conductor();
  // Placeholders; not measured values.
  if (name == "soil") return Material::dielectric(4.0, 0.05);
  if (name == "rock") return Material::dielectric(6.0, 0.02);
  return std::nullopt;
}

std::vector<std::string> material_preset_names() { return {"air", "cement", "water", "metal", "soil", "rock"}; }

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of(text, e.byte), e.what());
  }
  Reader rd(source);
  rd.check_keys(doc, "scenario",
                {"name", "description", "grid", "layers", "materials", "range", "instrument", "candidates"});

  std::map<std::string, Material> materials;
  for (const auto& n : material_preset_names()) materials.emplace(n, *material_preset(n));
  if (doc.contains("materials")) {
    if (!doc["materials"].is_object()) rd.fail("materials", "expected an object");
    for (const auto& [key, def] : doc["materials"].items())
      materials.insert_or_assign(key, rd.material_def(def, "materials." + key));
  }
  auto resolve = [&](const json& m, const std::string& where) -> Material {
    if (m.is_string()) {
      const auto it = materials.find(m.get<std::string>());
      if (it == materials.end()) rd.fail(where, "unknown material '" + m.get<std::string>() + "'");
      return it->second;
    }
    return rd.material_def(m, where);
  };

  if (!doc.contains("grid")) rd.fail("scenario", "missing 'grid'");
  const json& g = doc["grid"];
  rd.check_keys(g, "grid", {"start", "stop", "count"});
  if (!g.contains("start") || !g.contains("stop") || !g.contains("count"))
    rd.fail("grid", "needs 'start', 'stop' and 'count'");
  if (!g["count"].is_number_unsigned() || g["count"].get<std::size_t>() < 1)
    rd.fail("grid.count", "expected a positive integer");
  const double start = rd.quantity(g["start"], Quantity::Frequency, "grid.start");
  const double stop = rd.quantity(g["stop"], Quantity::Frequency, "grid.stop");

  if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty())
    rd.fail("scenario", "'layers' must be a non-empty array");
  std::vector<Layer> layers;
  for (std::size_t i = 0; i < doc["layers"].size(); ++i) {
    const std::string where = "layers[" + std::to_string(i) + "]";
    const json& l = doc["layers"][i];
    rd.check_keys(l, where, {"material", "thickness"});
    if (!l.contains("material") || !l.contains("thickness")) rd.fail(where, "needs 'material' and 'thickness'");
    const Material m = resolve(l["material"], where + ".material");
    const double t = rd.quantity(l["thickness"], Quantity::Length, where + ".thickness");
    try {
      layers.emplace_back(m, t);
    } catch (const InvalidArgument& e) {
      rd.fail(where, e.what());
    }
  }

  std::optional<InstrumentSpec> instrument;
  if (doc.contains("instrument")) {
    const json& in = doc["instrument"];
    rd.check_keys(in, "instrument", {"incident", "background", "transfer", "noise_level"});
    InstrumentSpec spec;
    if (in.contains("incident")) spec.incident = rd.tone(in["incident"], "instrument.incident");
    if (in.contains("background")) spec.background = rd.tone(in["background"], "instrument.background");
    if (in.contains("transfer")) spec.transfer = rd.tone(in["transfer"], "instrument.transfer");
    if (in.contains("noise_level")) spec.noise_level = rd.number(in["noise_level"], "instrument.noise_level");
    if (!std::isfinite(spec.noise_level) || spec.noise_level < 0.0)
      rd.fail("instrument.noise_level", "must be finite and >= 0");
    instrument = spec;
  }

  double range_m = 0.0;
  bool apply_phase = false;
  if (doc.contains("range")) {
    const json& r = doc["range"];
    rd.check_keys(r, "range", {"distance", "apply_phase"});
    if (r.contains("distance")) range_m = rd.quantity(r["distance"], Quantity::Length, "range.distance");
    if (r.contains("apply_phase")) {
      if (!r["apply_phase"].is_boolean()) rd.fail("range.apply_phase", "expected true or false");
      apply_phase = r["apply_phase"].get<bool>();
    }
    if (!std::isfinite(range_m) || range_m < 0.0) rd.fail("range.distance", "must be >= 0");
  }

  std::vector<NamedMaterial> candidates;
  if (doc.contains("candidates")) {
    if (!doc["candidates"].is_array()) rd.fail("candidates", "expected an array of material names");
    for (const auto& c : doc["candidates"]) {
      if (!c.is_string()) rd.fail("candidates", "expected material names");
      candidates.push_back({c.get<std::string>(), resolve(c, "candidates")});
    }
  }

  try {
    return Scenario{doc.value("name", std::string("unnamed")),
                    Stack(std::move(layers)),
                    FrequencyGrid::linear(start, stop, g["count"].get<std::size_t>()),
                    instrument,
                    std::move(candidates),
                    range_m,
                    apply_phase};
  } catch (const InvalidArgument& e) {
    rd.fail("scenario", e.what());
  }
}

std::string builtin_scenario_text(const std::string& name) {
  if (name == "default-sandwich") return kDefaultSandwich;
  if (name == "wall-block") return kWallBlock;
  return {};
}

Scenario load_scenario(const std::string& path_or_name) {
  std::ifstream in(path_or_name);
  if (!in) {
    const std::string builtin = builtin_scenario_text(path_or_name);
    if (!builtin.empty()) return parse_scenario(builtin, path_or_name);
    throw std::runtime_error("cannot open scenario '" + path_or_name + "'");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str(), path_or_name);
}

ComplexSpectrum apply_range_phase(const ComplexSpectrum& r, double range_m) {
  ComplexSpectrum out = r;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= std::polar(1.0, -2.0 * wavenumber(out.grid()[i]) * range_m);
  return out;
}

}  // namespace twsense
