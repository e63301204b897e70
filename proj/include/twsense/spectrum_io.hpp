#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "twsense/em_core.hpp"

namespace twsense {

// CSV:        header `freq_hz,re,im`, one point per row, 17 significant digits.
//             Invalid points are written as `#invalid,<freq>,<re>,<im>`; other
//             lines starting with `#` are comments.
// Touchstone: v1 one-port (.s1p). Reads `# <HZ|KHZ|MHZ|GHZ> S <RI|MA|DB> R <z0>`
//             option lines and `!` comments; writes `# HZ S RI R 50` and omits
//             invalid points.
enum class SpectrumFormat { Csv, Touchstone };

/// .s1p (any case) selects Touchstone; everything else CSV.
SpectrumFormat format_for_path(const std::filesystem::path& path);

/// Throws ParseError (with line number) on malformed content.
ComplexSpectrum read_spectrum(std::istream& in, SpectrumFormat format, const std::string& source = "<stream>");
ComplexSpectrum read_spectrum(const std::filesystem::path& path, SpectrumFormat format);
ComplexSpectrum read_spectrum(const std::filesystem::path& path);

void write_spectrum(std::ostream& out, const ComplexSpectrum& spectrum, SpectrumFormat format);
void write_spectrum(const std::filesystem::path& path, const ComplexSpectrum& spectrum, SpectrumFormat format);
void write_spectrum(const std::filesystem::path& path, const ComplexSpectrum& spectrum);

/// Plot companion: `freq_hz,mag_db,phase_deg` with 20·log10|r| and arg(r) in degrees.
void write_magphase_csv(std::ostream& out, const ComplexSpectrum& spectrum);
void write_magphase_csv(const std::filesystem::path& path, const ComplexSpectrum& spectrum);

/// Writes via a temporary file in the same directory, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace twsense
