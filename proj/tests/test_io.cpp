#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "twsense/errors.hpp"
#include "twsense/forward_solver.hpp"
#include "twsense/scenario.hpp"
#include "twsense/spectrum_io.hpp"
#include "twsense/units.hpp"

using namespace twsense;
using namespace twsense::test;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  TempDir() : path(fs::temp_directory_path() / ("twsense_io_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

ComplexSpectrum parse(const std::string& text, SpectrumFormat fmt) {
  std::istringstream in(text);
  return read_spectrum(in, fmt, "fixture");
}

std::size_t parse_error_line(const std::string& text, SpectrumFormat fmt) {
  try {
    (void)parse(text, fmt);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

bool bit_identical(const ComplexSpectrum& a, const ComplexSpectrum& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.grid()[i] != b.grid()[i] || a[i] != b[i] || a.is_valid(i) != b.is_valid(i)) return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("csv reading") {
  const auto s = parse("freq_hz,re,im\n1e9,0,0\n2e9,0,0\n3e9,0,0\n", SpectrumFormat::Csv);
  REQUIRE(s.size() == 3);
  CHECK(s.grid()[1] == 2e9);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s[i] == cplx(0.0));

  const auto c = parse("# comment\nfreq_hz,re,im\n1e9,0.5,-0.25\n#invalid,2e9,1,1\n3e9,1e-3,2e-3\n", SpectrumFormat::Csv);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == cplx(0.5, -0.25));
  CHECK_FALSE(c.is_valid(1));
  CHECK(c.is_valid(2));

  CHECK(parse_error_line("freq,re,im\n1e9,0,0\n", SpectrumFormat::Csv) == 1);
  CHECK(parse_error_line("freq_hz,re,im\n1e9,0,0\n2e9,0\n", SpectrumFormat::Csv) == 3);
  CHECK(parse_error_line("freq_hz,re,im\n1e9,0,0\n2e9,abc,0\n", SpectrumFormat::Csv) == 3);
  CHECK(parse_error_line("freq_hz,re,im\n1e9,0,0\n2e9,0,0\n2e9,0,0\n", SpectrumFormat::Csv) == 4);
  CHECK(parse_error_line("freq_hz,re,im\n2e9,0,0\n1e9,0,0\n", SpectrumFormat::Csv) == 3);
  CHECK_THROWS_AS(parse("freq_hz,re,im\n", SpectrumFormat::Csv), ParseError);
}

TEST_CASE("touchstone reading") {
  SUBCASE("GHz frequencies are scaled on ingest") {
    const auto s = parse("! fixture\n# GHZ S RI R 50\n26.5 0.1 -0.2\n40 0.3 0.4\n", SpectrumFormat::Touchstone);
    REQUIRE(s.size() == 2);
    CHECK(s.grid()[0] == 26.5e9);
    CHECK(s.grid()[1] == 40e9);
    CHECK(s[0] == cplx(0.1, -0.2));
    CHECK(s[1] == cplx(0.3, 0.4));
  }
  SUBCASE("Hz with inline comments") {
    const auto s = parse("# HZ S RI R 50\n1e9 1 0 ! first\n2e9 0 1\n", SpectrumFormat::Touchstone);
    CHECK(s.grid()[0] == 1e9);
    CHECK(s[1] == cplx(0.0, 1.0));
  }
  SUBCASE("magnitude/angle and dB/angle") {
    const auto ma = parse("# MHZ S MA R 50\n1000 0.5 90\n", SpectrumFormat::Touchstone);
    CHECK(ma.grid()[0] == 1e9);
    CHECK(std::abs(ma[0] - cplx(0.0, 0.5)) < 1e-15);
    const auto db = parse("# HZ S DB R 50\n1e9 -20 180\n", SpectrumFormat::Touchstone);
    CHECK(std::abs(db[0] - cplx(-0.1, 0.0)) < 1e-15);
  }
  SUBCASE("errors") {
    CHECK(parse_error_line("# HZ Y RI R 50\n1e9 0 0\n", SpectrumFormat::Touchstone) == 1);
    CHECK(parse_error_line("! c\n# HZ S XX R 50\n", SpectrumFormat::Touchstone) == 2);
    CHECK(parse_error_line("# HZ S RI R 50\n# HZ S RI R 50\n1e9 0 0\n", SpectrumFormat::Touchstone) == 2);
    CHECK(parse_error_line("# HZ S RI R 50\n1e9 0\n", SpectrumFormat::Touchstone) == 2);
    CHECK(parse_error_line("# HZ S RI R 50\n2e9 0 0\n1e9 0 0\n", SpectrumFormat::Touchstone) == 3);
  }
}

TEST_CASE("round trips") {
  TempDir dir;
  Rng rng(12);
  const auto g = ka_band(1601);
  ComplexSpectrum s(g);
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * 1e-3;
  s[7] = cplx(std::nextafter(0.1, 1.0), -std::numeric_limits<double>::denorm_min());

  SUBCASE("csv is bit-identical") {
    write_spectrum(dir.path / "a.csv", s);
    CHECK(bit_identical(read_spectrum(dir.path / "a.csv"), s));
  }
  SUBCASE("csv keeps invalid points") {
    ComplexSpectrum holes = s;
    holes.set_valid(3, false);
    holes.set_valid(1600, false);
    write_spectrum(dir.path / "h.csv", holes);
    CHECK(bit_identical(read_spectrum(dir.path / "h.csv"), holes));
  }
  SUBCASE("s1p is bit-identical and drops invalid points") {
    write_spectrum(dir.path / "a.s1p", s);
    CHECK(format_for_path(dir.path / "a.s1p") == SpectrumFormat::Touchstone);
    CHECK(bit_identical(read_spectrum(dir.path / "a.s1p"), s));
    CHECK(slurp(dir.path / "a.s1p").find("# HZ S RI R 50") != std::string::npos);
    ComplexSpectrum holes = s;
    holes.set_valid(5, false);
    write_spectrum(dir.path / "h.S1P", holes);
    CHECK(read_spectrum(dir.path / "h.S1P").size() == g.size() - 1);
  }
  SUBCASE("zero spectrum") {
    write_spectrum(dir.path / "z.csv", ComplexSpectrum(ka_band(5)));
    const auto z = read_spectrum(dir.path / "z.csv");
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == cplx(0.0));
  }
  SUBCASE("writes replace atomically") {
    write_file_atomic(dir.path / "f.txt", "first");
    write_file_atomic(dir.path / "f.txt", "second");
    CHECK(slurp(dir.path / "f.txt") == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
    CHECK(entries == 1);
  }
  CHECK_THROWS_AS(read_spectrum(dir.path / "missing.csv"), std::exception);
}

TEST_CASE("magnitude/phase companion") {
  const auto g = ka_band(101);
  const auto r = stack_reflection(Stack({Layer(kCement, kWallT)}), g).r;
  std::ostringstream out;
  write_magphase_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "freq_hz,mag_db,phase_deg");
  std::size_t i = 0;
  while (std::getline(in, line)) {
    double f, mag_db, phase;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &f, &mag_db, &phase) == 3);
    CHECK(f == g[i]);
    CHECK(mag_db == doctest::Approx(20.0 * std::log10(std::abs(r[i]))).epsilon(1e-14));
    CHECK(phase == doctest::Approx(std::arg(r[i]) * 180.0 / kPi).epsilon(1e-14));
    ++i;
  }
  CHECK(i == g.size());
}

TEST_CASE("units") {
  CHECK(parse_quantity("1.4 in", Quantity::Length) == doctest::Approx(0.03556).epsilon(1e-15));
  CHECK(parse_quantity("1.4in", Quantity::Length) == doctest::Approx(0.03556).epsilon(1e-15));
  CHECK(parse_quantity("7\"", Quantity::Length) == doctest::Approx(0.1778).epsilon(1e-15));
  CHECK(parse_quantity("12 mm", Quantity::Length) == doctest::Approx(0.012));
  CHECK(parse_quantity("0.5", Quantity::Length) == 0.5);
  CHECK(parse_quantity("2", Quantity::Length, "cm") == doctest::Approx(0.02));
  CHECK(parse_quantity("26.5 GHz", Quantity::Frequency) == 26.5e9);
  CHECK(parse_quantity("26.5 ghz", Quantity::Frequency) == 26.5e9);
  CHECK(parse_quantity("29.98", Quantity::Frequency, "GHz") == 29.98e9);
  CHECK(parse_quantity("30 dBm", Quantity::Power) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(parse_quantity("-30 dBW", Quantity::Power) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(parse_quantity("250 mW", Quantity::Power) == doctest::Approx(0.25));
  CHECK(parse_quantity("30 dB", Quantity::Gain) == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(parse_quantity("20 dBi", Quantity::Gain) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(parse_quantity("1000", Quantity::Gain) == 1000.0);

  CHECK_THROWS_AS(parse_quantity("", Quantity::Length), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("1.4 GHz", Quantity::Length), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("abc", Quantity::Frequency), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("5 parsecs", Quantity::Length), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("1", Quantity::Frequency, "furlong"), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("nan", Quantity::Power), InvalidArgument);
}

TEST_CASE("scenarios") {
  const std::string minimal = R"({"grid": {"start": "26.5 GHz", "stop": "40 GHz", "count": 11},
    "layers": [{"material": "cement", "thickness": "1.4 in"}]})";

  SUBCASE("minimal") {
    const Scenario s = parse_scenario(minimal);
    CHECK(s.grid.size() == 11);
    CHECK(s.stack.size() == 1);
    CHECK(s.stack.layers()[0].material == kCement);
    CHECK(s.stack.layers()[0].thickness == doctest::Approx(kWallT).epsilon(1e-15));
    CHECK_FALSE(s.instrument.has_value());
  }

  SUBCASE("shipped default") {
    const Scenario s = load_scenario("default-sandwich");
    CHECK(s.grid.size() == 1601);
    CHECK(s.grid.front() == 26.5e9);
    CHECK(s.grid.back() == 40e9);
    REQUIRE(s.stack.size() == 3);
    CHECK(s.stack.layers()[1].material == kWater);
    CHECK(s.stack.layers()[1].thickness == doctest::Approx(kObjectT).epsilon(1e-15));
    CHECK(s.range_m == doctest::Approx(0.762).epsilon(1e-15));
    CHECK_FALSE(s.apply_range_phase);
    CHECK(s.instrument.has_value());
    CHECK(s.candidates.size() == 5);
    const auto geom = s.sandwich_geometry();
    CHECK(geom.wall == kCement);
    CHECK(geom.object_thickness == doctest::Approx(kObjectT).epsilon(1e-15));
  }

  SUBCASE("built-in text matches the shipped files") {
    for (const std::string name : {"default-sandwich", "wall-block"}) {
      CAPTURE(name);
      const fs::path file = fs::path(TWSENSE_SOURCE_DIR) / "scenarios" / (name + ".json");
      REQUIRE(fs::exists(file));
      CHECK(slurp(file) == builtin_scenario_text(name));
    }
    CHECK(builtin_scenario_text("nope").empty());
  }

  SUBCASE("custom materials") {
    const Scenario s = parse_scenario(R"({"grid": {"start": 26.5e9, "stop": 40e9, "count": 3},
      "materials": {"brick": {"eps_real": 4.5, "loss_tangent": 0.02}, "foil": {"kind": "perfect-conductor"}},
      "layers": [{"material": "brick", "thickness": 0.1}, {"material": "foil", "thickness": "1 mm"}]})");
    CHECK(s.stack.layers()[0].material == Material::dielectric(4.5, 0.02));
    CHECK(s.stack.conductor_backed());
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(parse_scenario(R"({"grid": {"start": 1e9, "stop": 2e9, "count": 3},
      "layers": [{"material": "air", "thickness": 0.1}], "colour": "red"})"), InvalidArgument);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"grid": {"start": 1e9, "stop": 2e9, "count": 3},
      "layers": [{"material": "metal", "thickness": 0.01}, {"material": "cement", "thickness": 0.03}]})"),
                         doctest::Contains("last layer"), InvalidArgument);
    CHECK_THROWS_AS(parse_scenario(R"({"grid": {"start": 1e9, "stop": 2e9, "count": 3},
      "layers": [{"material": "unobtainium", "thickness": 0.1}]})"), InvalidArgument);
    CHECK_THROWS_AS(parse_scenario(R"({"grid": {"start": 1e9, "stop": 2e9, "count": 3}, "layers": []})"),
                    InvalidArgument);
    CHECK_THROWS_AS(parse_scenario(R"({"grid": {"start": 1e9, "stop": 2e9, "count": 3},
      "layers": [{"material": "air", "thickness": "3 GHz"}]})"), InvalidArgument);
    try {
      (void)parse_scenario("{\n  \"grid\": {\n  ,\n}", "broken.json");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(load_scenario("/no/such/file.json"), std::exception);
  }

  SUBCASE("sandwich geometry needs matching walls") {
    const Scenario single = parse_scenario(minimal);
    CHECK_THROWS_AS(single.sandwich_geometry(), InvalidArgument);
  }
}

TEST_CASE("material presets") {
  for (const auto& name : material_preset_names()) CHECK(material_preset(name).has_value());
  CHECK(material_preset("cement") == kCement);
  CHECK(material_preset("water") == kWater);
  CHECK(material_preset("metal")->is_conductor());
  CHECK_FALSE(material_preset("kryptonite").has_value());
}

TEST_CASE("range phase") {
  const auto g = ka_band(11);
  const auto r = slab_reflection(kCement.permittivity(), kWallT, g);
  const auto shifted = apply_range_phase(r, 0.762);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(shifted[i]) == doctest::Approx(std::abs(r[i])).epsilon(1e-14));
    CHECK(rel_err(shifted[i], r[i] * std::exp(cplx(0.0, -2.0 * wavenumber(g[i]) * 0.762))) < 1e-13);
  }
  CHECK(bit_identical(apply_range_phase(r, 0.0), r));
}
