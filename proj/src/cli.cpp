#include "twsense/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "twsense/calibration.hpp"
#include "twsense/errors.hpp"
#include "twsense/forward_solver.hpp"
#include "twsense/inversion.hpp"
#include "twsense/kernels.hpp"
#include "twsense/scenario.hpp"
#include "twsense/spectrum_io.hpp"
#include "twsense/units.hpp"

namespace twsense::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double flag_quantity(const std::string& flag, const std::string& text, Quantity q, std::string_view unit = {}) {
  try {
    return parse_quantity(text, q, unit);
  } catch (const InvalidArgument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

SpectrumFormat pick_format(const std::string& choice, const fs::path& path) {
  if (choice == "csv") return SpectrumFormat::Csv;
  if (choice == "s1p") return SpectrumFormat::Touchstone;
  return format_for_path(path);
}

ComplexSpectrum read_input(const std::string& flag, const std::string& path) {
  if (!fs::exists(path)) throw std::runtime_error(flag + ": no such file '" + path + "'");
  return read_spectrum(fs::path(path));
}

ComplexSpectrum simulate_global(const Scenario& sc) {
  const SandwichGeometry g = sc.sandwich_geometry();
  const auto layers = sc.stack.layers();
  if (layers.size() != 3) throw UsageError("--solver global needs a three-layer wall/object/wall scenario");
  const cplx eps_w = g.wall.permittivity();
  const cplx eps_o = layers[1].material.permittivity();
  ComplexSpectrum r(sc.grid);
  for (std::size_t i = 0; i < sc.grid.size(); ++i)
    r[i] = solve_sandwich(eps_w, eps_o, g.wall_thickness, g.object_thickness, sc.grid[i]).r;
  return r;
}

void write_companion(const std::string& path, const ComplexSpectrum& s) {
  if (!path.empty()) write_magphase_csv(fs::path(path), s);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered-media reflection simulation, calibration and permittivity inversion"};
  app.name("twsense");
  app.require_subcommand(1);
  std::string simd_level = "auto";
  app.add_option("--simd", simd_level, "Kernel variant")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Reflection spectrum of a scenario stack");
  std::string sim_scenario, sim_out, sim_format = "auto", sim_magphase, sim_solver = "recursive", sim_trans;
  sim->add_option("scenario", sim_scenario, "Scenario file or built-in name")->required();
  sim->add_option("-o,--output", sim_out, "Output spectrum (.csv or .s1p)")->required();
  sim->add_option("--format", sim_format)->check(CLI::IsMember({"auto", "csv", "s1p"}));
  sim->add_option("--magphase", sim_magphase, "Also write freq_hz,mag_db,phase_deg CSV");
  sim->add_option("--solver", sim_solver)->check(CLI::IsMember({"recursive", "global"}));
  sim->add_option("--transmission", sim_trans, "Also write the transmission spectrum");

  // synth
  auto* syn = app.add_subcommand("synth", "Synthesize raw/background/metal measurements");
  std::string syn_scenario, syn_rtrue, syn_dir, syn_format = "csv";
  std::uint64_t syn_seed = 0;
  std::optional<double> syn_noise;
  syn->add_option("scenario", syn_scenario)->required();
  syn->add_option("--r-true", syn_rtrue, "True reflection spectrum (default: simulate the scenario)");
  syn->add_option("--seed", syn_seed, "Noise seed");
  syn->add_option("--noise", syn_noise, "Override the scenario noise level");
  syn->add_option("-o,--output", syn_dir, "Output directory")->required();
  syn->add_option("--format", syn_format)->check(CLI::IsMember({"csv", "s1p"}));

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Background/metal-plate calibration");
  std::string cal_raw, cal_bg, cal_metal, cal_out, cal_format = "auto", cal_magphase;
  double cal_threshold = kDefaultCalibrationThreshold;
  cal->add_option("--raw", cal_raw)->required();
  cal->add_option("--background", cal_bg)->required();
  cal->add_option("--metal", cal_metal)->required();
  cal->add_option("-o,--output", cal_out)->required();
  cal->add_option("--format", cal_format)->check(CLI::IsMember({"auto", "csv", "s1p"}));
  cal->add_option("--threshold", cal_threshold, "Relative denominator threshold")->check(CLI::PositiveNumber);
  cal->add_option("--magphase", cal_magphase);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit slab permittivity to a reflection spectrum");
  std::string fit_spec, fit_thick, fit_out;
  std::vector<std::string> fit_starts;
  bool fit_no_scan = false;
  fit->add_option("--spectrum", fit_spec)->required();
  fit->add_option("--thickness", fit_thick, "Slab thickness (m, or with unit: 1.4in)")->required();
  fit->add_option("--start", fit_starts, "Start point eps_real,loss_tangent (repeatable)");
  fit->add_flag("--no-scan", fit_no_scan, "Skip the fringe-order scan");
  fit->add_option("--out", fit_out, "Write the fit result as JSON");

  // contrast
  auto* con = app.add_subcommand("contrast", "Pointwise difference a - ref");
  std::string con_a, con_ref, con_out, con_format = "auto", con_magphase;
  con->add_option("--a", con_a)->required();
  con->add_option("--ref", con_ref)->required();
  con->add_option("-o,--output", con_out)->required();
  con->add_option("--format", con_format)->check(CLI::IsMember({"auto", "csv", "s1p"}));
  con->add_option("--magphase", con_magphase);

  // range
  auto* rng = app.add_subcommand("range", "Friis detection range");
  std::string r_pt, r_pd, r_gain_db, r_gain, r_freq_ghz, r_freq, r_wavelength;
  rng->add_option("--pt", r_pt, "Transmit power (W, or 30dBm)")->required();
  rng->add_option("--pdmin", r_pd, "Minimum detectable power (W, or dBm)")->required();
  auto* g_db = rng->add_option("--gain-db", r_gain_db, "System gain in dB");
  auto* g_lin = rng->add_option("--gain", r_gain, "System gain, linear (or with dB suffix)");
  g_db->excludes(g_lin);
  auto* f_ghz = rng->add_option("--freq-ghz", r_freq_ghz, "Frequency in GHz");
  auto* f_any = rng->add_option("--freq", r_freq, "Frequency (Hz, or with unit)");
  auto* wl = rng->add_option("--wavelength", r_wavelength, "Wavelength (m, or with unit)");
  f_ghz->excludes(f_any)->excludes(wl);
  f_any->excludes(wl);

  // rank
  auto* rnk = app.add_subcommand("rank", "Rank candidate object materials against a measured sandwich");
  std::string rk_spec, rk_scenario;
  std::vector<std::string> rk_candidates;
  rnk->add_option("--spectrum", rk_spec)->required();
  rnk->add_option("--scenario", rk_scenario, "Scenario giving the wall geometry")->required();
  rnk->add_option("--candidates", rk_candidates, "Material names (default: scenario candidates)")->delimiter(',');

  std::vector<std::string> argv_store{"twsense"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simd_level == "scalar") simd::set_active_level(simd::Level::Scalar);
    else if (simd_level == "avx2") simd::set_active_level(simd::Level::Avx2);

    if (*sim) {
      const Scenario sc = load_scenario(sim_scenario);
      ComplexSpectrum r = sim_solver == "global" ? simulate_global(sc) : stack_reflection(sc.stack, sc.grid).r;
      if (sc.apply_range_phase) r = apply_range_phase(r, sc.range_m);
      write_spectrum(sim_out, r, pick_format(sim_format, sim_out));
      write_companion(sim_magphase, r);
      if (!sim_trans.empty()) {
        const auto t = stack_reflection(sc.stack, sc.grid).t;
        write_spectrum(sim_trans, t, pick_format(sim_format, sim_trans));
      }
      out << "wrote " << r.size() << " points (" << fmt("%.6g", sc.grid.front() / 1e9) << "-"
          << fmt("%.6g", sc.grid.back() / 1e9) << " GHz) to " << sim_out << "\n";
    } else if (*syn) {
      const Scenario sc = load_scenario(syn_scenario);
      if (!sc.instrument) throw std::runtime_error("scenario '" + syn_scenario + "' has no 'instrument' section");
      InstrumentSpec spec = *sc.instrument;
      if (syn_noise) {
        if (!(*syn_noise >= 0.0)) throw UsageError("--noise must be >= 0");
        spec.noise_level = *syn_noise;
      }
      ComplexSpectrum r_true = syn_rtrue.empty() ? stack_reflection(sc.stack, sc.grid).r : read_input("--r-true", syn_rtrue);
      if (syn_rtrue.empty() && sc.apply_range_phase) r_true = apply_range_phase(r_true, sc.range_m);
      const CalibrationSet set = synthesize_measurement(r_true, spec.model(r_true.grid()), syn_seed);
      fs::create_directories(syn_dir);
      const std::string ext = syn_format == "s1p" ? ".s1p" : ".csv";
      const auto fmt_id = syn_format == "s1p" ? SpectrumFormat::Touchstone : SpectrumFormat::Csv;
      write_spectrum(fs::path(syn_dir) / ("raw" + ext), set.raw(), fmt_id);
      write_spectrum(fs::path(syn_dir) / ("background" + ext), set.background(), fmt_id);
      write_spectrum(fs::path(syn_dir) / ("metal" + ext), set.metal(), fmt_id);
      out << "wrote raw" << ext << ", background" << ext << ", metal" << ext << " to " << syn_dir
          << " (noise " << spec.noise_level << ", seed " << syn_seed << ")\n";
    } else if (*cal) {
      const CalibrationSet set(read_input("--raw", cal_raw), read_input("--background", cal_bg),
                               read_input("--metal", cal_metal));
      const ComplexSpectrum r = apply_calibration(set, cal_threshold);
      write_spectrum(cal_out, r, pick_format(cal_format, cal_out));
      write_companion(cal_magphase, r);
      out << "calibrated " << r.size() << " points";
      if (r.valid_count() != r.size()) out << " (" << r.size() - r.valid_count() << " flagged invalid)";
      out << " -> " << cal_out << "\n";
    } else if (*fit) {
      const double thickness = flag_quantity("--thickness", fit_thick, Quantity::Length);
      std::vector<FitStart> starts;
      for (const auto& s : fit_starts) {
        const auto comma = s.find(',');
        if (comma == std::string::npos) throw UsageError("--start expects eps_real,loss_tangent, got '" + s + "'");
        try {
          starts.push_back({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
        } catch (const std::exception&) {
          throw UsageError("--start expects eps_real,loss_tangent, got '" + s + "'");
        }
      }
      if (starts.empty()) starts = default_fit_starts();
      FitOptions opt;
      opt.fringe_scan = !fit_no_scan;
      FitResult res;
      try {
        res = fit_slab_permittivity(read_input("--spectrum", fit_spec), thickness, starts, opt);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      out << "eps_real      = " << fmt("%.10g", res.eps_real) << "\n"
          << "loss_tangent  = " << fmt("%.10g", res.loss_tangent) << "\n"
          << "residual_rms  = " << fmt("%.6g", res.residual_rms) << "\n"
          << "iterations    = " << res.iterations << "\n"
          << "converged     = " << (res.converged ? "true" : "false") << "\n";
      if (!fit_out.empty()) {
        nlohmann::json j{{"eps_real", res.eps_real},
                         {"loss_tangent", res.loss_tangent},
                         {"residual_rms", res.residual_rms},
                         {"gradient_norm", res.gradient_norm},
                         {"iterations", res.iterations},
                         {"converged", res.converged},
                         {"start_point_used", {res.start_point_used.eps_real, res.start_point_used.loss_tangent}},
                         {"thickness_m", thickness}};
        write_file_atomic(fit_out, j.dump(2) + "\n");
      }
    } else if (*con) {
      const ComplexSpectrum d = contrast_spectrum(read_input("--a", con_a), read_input("--ref", con_ref));
      write_spectrum(con_out, d, pick_format(con_format, con_out));
      write_companion(con_magphase, d);
      out << "wrote contrast of " << d.size() << " points to " << con_out << "\n";
    } else if (*rng) {
      const double pt = flag_quantity("--pt", r_pt, Quantity::Power);
      const double pd = flag_quantity("--pdmin", r_pd, Quantity::Power);
      double gain = 1.0;
      if (!r_gain_db.empty()) gain = flag_quantity("--gain-db", r_gain_db, Quantity::Gain, "dB");
      else if (!r_gain.empty()) gain = flag_quantity("--gain", r_gain, Quantity::Gain);
      double wavelength = 0.0;
      if (!r_freq_ghz.empty()) wavelength = kSpeedOfLight / flag_quantity("--freq-ghz", r_freq_ghz, Quantity::Frequency, "GHz");
      else if (!r_freq.empty()) wavelength = kSpeedOfLight / flag_quantity("--freq", r_freq, Quantity::Frequency);
      else if (!r_wavelength.empty()) wavelength = flag_quantity("--wavelength", r_wavelength, Quantity::Length);
      else throw UsageError("range needs one of --freq-ghz, --freq or --wavelength");
      double range = 0.0;
      try {
        range = friis_range(RangeBudget(pt, pd, gain, wavelength));
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      out << "R = " << fmt("%.10g", range) << " m\n";
    } else if (*rnk) {
      const Scenario sc = load_scenario(rk_scenario);
      std::vector<NamedMaterial> candidates;
      if (rk_candidates.empty()) {
        candidates = sc.candidates;
      } else {
        for (const auto& name : rk_candidates) {
          const auto m = material_preset(name);
          const auto it = std::find_if(sc.candidates.begin(), sc.candidates.end(),
                                       [&](const NamedMaterial& c) { return c.name == name; });
          if (it != sc.candidates.end()) candidates.push_back(*it);
          else if (m) candidates.push_back({name, *m});
          else throw UsageError("--candidates: unknown material '" + name + "'");
        }
      }
      if (candidates.empty()) throw UsageError("no candidates: pass --candidates or list them in the scenario");
      ComplexSpectrum meas = read_input("--spectrum", rk_spec);
      const auto ranked = rank_materials(meas, candidates, sc.sandwich_geometry());
      for (std::size_t i = 0; i < ranked.size(); ++i)
        out << i + 1 << ". " << ranked[i].name << "  misfit " << fmt("%.6g", ranked[i].misfit) << "\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace twsense::cli
