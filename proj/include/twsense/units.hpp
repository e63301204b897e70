#pragma once

#include <string_view>

namespace twsense {

enum class Quantity { Length, Frequency, Power, Gain };

/// Parses "<number>[ ]<unit>" into SI (m, Hz, W) or a linear gain.
///   length:    m, cm, mm, in (also inch, ")
///   frequency: Hz, kHz, MHz, GHz
///   power:     W, mW, uW, dBm, dBW
///   gain:      dB, dBi, or bare linear
/// A bare number is read in `default_unit`, which must itself be one of the
/// units above (empty = the SI unit, or linear for gain). Case-insensitive.
/// Throws InvalidArgument on anything else.
double parse_quantity(std::string_view text, Quantity quantity, std::string_view default_unit = {});

}  // namespace twsense
