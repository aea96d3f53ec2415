#pragma once

#include "rift/types.hpp"

#include <string>

namespace rift {

/// Binary TFR container: little-endian "RIFT", version u32, U u32, V u32,
/// f_min f64, f_max f64, dt f64, then U*V float64 row-major.
void write_tfr(const std::string& path, const TFR& tfr);
TFR read_tfr(const std::string& path);

/// 16-bit binary PGM (P5, most significant byte first), normalized per file.
/// Returns the normalization constant; signed fields map [-max, max] onto
/// the full range.
double write_pgm16(const std::string& path, const TFR& tfr, double gamma = 1.0);

}  // namespace rift
