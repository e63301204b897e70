#include "twsense/spectrum_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "twsense/errors.hpp"

namespace twsense {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Point {
  double f;
  cplx v;
  bool valid;
};

class PointCollector {
 public:
  explicit PointCollector(const std::string& source) : source_(source) {}

  void add(std::size_t line, double f, cplx v, bool valid) {
    if (!std::isfinite(f) || f <= 0.0) throw ParseError(source_, line, "frequency must be finite and > 0");
    if (!points_.empty() && !(f > points_.back().f))
      throw ParseError(source_, line, "frequencies must be strictly increasing");
    points_.push_back({f, v, valid});
  }

  ComplexSpectrum finish(std::size_t line) const {
    if (points_.empty()) throw ParseError(source_, line, "no data points");
    std::vector<double> freqs;
    std::vector<cplx> values;
    for (const auto& p : points_) {
      freqs.push_back(p.f);
      values.push_back(p.v);
    }
    ComplexSpectrum s(FrequencyGrid::from_points(std::move(freqs)), std::move(values));
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (!points_[i].valid) s.set_valid(i, false);
    return s;
  }

 private:
  const std::string& source_;
  std::vector<Point> points_;
};

ComplexSpectrum read_csv(std::istream& in, const std::string& source) {
  PointCollector pts(source);
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  constexpr std::string_view kInvalid = "#invalid,";
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty()) continue;
    bool valid = true;
    if (s.substr(0, kInvalid.size()) == kInvalid) {
      valid = false;
      s.remove_prefix(kInvalid.size());
    } else if (s.front() == '#') {
      continue;
    }
    if (!have_header) {
      const auto cols = split(s, ',');
      if (!valid || cols.size() != 3 || cols[0] != "freq_hz" || cols[1] != "re" || cols[2] != "im")
        throw ParseError(source, line, "expected header 'freq_hz,re,im'");
      have_header = true;
      continue;
    }
    const auto cols = split(s, ',');
    if (cols.size() != 3) throw ParseError(source, line, "expected 3 columns, got " + std::to_string(cols.size()));
    double f = 0, re = 0, im = 0;
    if (!parse_double(cols[0], f) || !parse_double(cols[1], re) || !parse_double(cols[2], im))
      throw ParseError(source, line, "malformed number");
    pts.add(line, f, {re, im}, valid);
  }
  if (!have_header) throw ParseError(source, line, "missing header 'freq_hz,re,im'");
  return pts.finish(line);
}

enum class DataFormat { RI, MA, DB };

ComplexSpectrum read_touchstone(std::istream& in, const std::string& source) {
  PointCollector pts(source);
  // Touchstone v1 default when no option line is present.
  double unit = 1e9;
  DataFormat fmt = DataFormat::MA;
  bool have_options = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto bang = s.find('!'); bang != std::string_view::npos) s = s.substr(0, bang);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (have_options) throw ParseError(source, line, "duplicate option line");
      have_options = true;
      const auto tok = split_ws(s.substr(1));
      for (std::size_t i = 0; i < tok.size(); ++i) {
        const std::string t = upper(tok[i]);
        if (t == "HZ") unit = 1.0;
        else if (t == "KHZ") unit = 1e3;
        else if (t == "MHZ") unit = 1e6;
        else if (t == "GHZ") unit = 1e9;
        else if (t == "S") continue;
        else if (t == "RI") fmt = DataFormat::RI;
        else if (t == "MA") fmt = DataFormat::MA;
        else if (t == "DB") fmt = DataFormat::DB;
        else if (t == "R") {
          double z0 = 0;
          if (i + 1 >= tok.size() || !parse_double(tok[i + 1], z0) || !(z0 > 0))
            throw ParseError(source, line, "option 'R' needs a positive reference impedance");
          ++i;
        } else {
          throw ParseError(source, line, "unsupported option '" + std::string(tok[i]) + "'");
        }
      }
      continue;
    }
    const auto tok = split_ws(s);
    if (tok.size() != 3)
      throw ParseError(source, line, "one-port data line needs 3 values, got " + std::to_string(tok.size()));
    double f = 0, a = 0, b = 0;
    if (!parse_double(tok[0], f) || !parse_double(tok[1], a) || !parse_double(tok[2], b))
      throw ParseError(source, line, "malformed number");
    cplx v;
    switch (fmt) {
      case DataFormat::RI: v = {a, b}; break;
      case DataFormat::MA: v = std::polar(a, b * kPi / 180.0); break;
      case DataFormat::DB: v = std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0); break;
    }
    pts.add(line, f * unit, v, true);
  }
  return pts.finish(line);
}

}  // namespace

SpectrumFormat format_for_path(const std::filesystem::path& path) {
  return upper(path.extension().string()) == ".S1P" ? SpectrumFormat::Touchstone : SpectrumFormat::Csv;
}

ComplexSpectrum read_spectrum(std::istream& in, SpectrumFormat format, const std::string& source) {
  return format == SpectrumFormat::Csv ? read_csv(in, source) : read_touchstone(in, source);
}

ComplexSpectrum read_spectrum(const std::filesystem::path& path, SpectrumFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectrum file '" + path.string() + "'");
  return read_spectrum(in, format, path.string());
}

ComplexSpectrum read_spectrum(const std::filesystem::path& path) { return read_spectrum(path, format_for_path(path)); }

void write_spectrum(std::ostream& out, const ComplexSpectrum& s, SpectrumFormat format) {
  if (format == SpectrumFormat::Csv) {
    out << "freq_hz,re,im\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.is_valid(i)) out << "#invalid,";
      out << fmt17(s.grid()[i]) << ',' << fmt17(s[i].real()) << ',' << fmt17(s[i].imag()) << '\n';
    }
  } else {
    out << "! one-port reflection, frequency in Hz, real/imaginary\n";
    out << "# HZ S RI R 50\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.is_valid(i)) continue;
      out << fmt17(s.grid()[i]) << ' ' << fmt17(s[i].real()) << ' ' << fmt17(s[i].imag()) << '\n';
    }
  }
}

void write_spectrum(const std::filesystem::path& path, const ComplexSpectrum& s, SpectrumFormat format) {
  std::ostringstream os;
  write_spectrum(os, s, format);
  write_file_atomic(path, os.str());
}

void write_spectrum(const std::filesystem::path& path, const ComplexSpectrum& s) {
  write_spectrum(path, s, format_for_path(path));
}

void write_magphase_csv(std::ostream& out, const ComplexSpectrum& s) {
  out << "freq_hz,mag_db,phase_deg\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s.is_valid(i)) out << "#invalid,";
    const double mag_db = 20.0 * std::log10(std::abs(s[i]));
    const double phase_deg = std::arg(s[i]) * 180.0 / kPi;
    out << fmt17(s.grid()[i]) << ',' << fmt17(mag_db) << ',' << fmt17(phase_deg) << '\n';
  }
}

void write_magphase_csv(const std::filesystem::path& path, const ComplexSpectrum& s) {
  std::ostringstream os;
  write_magphase_csv(os, s);
  write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

}  // namespace twsense
