#include "twsense/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "twsense/em_core.hpp"
#include "twsense/errors.hpp"

namespace twsense {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool to_si(double v, const std::string& unit, Quantity q, double& out) {
  switch (q) {
    case Quantity::Length:
      if (unit.empty() || unit == "m") out = v;
      else if (unit == "cm") out = v * 1e-2;
      else if (unit == "mm") out = v * 1e-3;
      else if (unit == "in" || unit == "inch" || unit == "inches" || unit == "\"") out = v * kInch;
      else return false;
      return true;
    case Quantity::Frequency:
      if (unit.empty() || unit == "hz") out = v;
      else if (unit == "khz") out = v * 1e3;
      else if (unit == "mhz") out = v * 1e6;
      else if (unit == "ghz") out = v * 1e9;
      else return false;
      return true;
    case Quantity::Power:
      if (unit.empty() || unit == "w") out = v;
      else if (unit == "mw") out = v * 1e-3;
      else if (unit == "uw") out = v * 1e-6;
      else if (unit == "dbm") out = std::pow(10.0, v / 10.0) * 1e-3;
      else if (unit == "dbw") out = std::pow(10.0, v / 10.0);
      else return false;
      return true;
    case Quantity::Gain:
      if (unit.empty()) out = v;
      else if (unit == "db" || unit == "dbi") out = std::pow(10.0, v / 10.0);
      else return false;
      return true;
  }
  return false;
}

}  // namespace

double parse_quantity(std::string_view text, Quantity quantity, std::string_view default_unit) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data())
    throw InvalidArgument("expected a number with optional unit, got '" + std::string(text) + "'");
  std::string unit = lower(trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr))));
  if (unit.empty()) unit = lower(default_unit);
  double out = 0.0;
  if (!to_si(value, unit, quantity, out) || !std::isfinite(out))
    throw InvalidArgument("unsupported unit or value in '" + std::string(text) + "'");
  return out;
}

}  // namespace twsense
