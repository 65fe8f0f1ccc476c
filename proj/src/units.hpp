#pragma once

#include <cmath>

namespace eeopt {

// Canonical units throughout the library: distances km, BS densities per
// km^2, energies joules per symbol, rates bit per symbol (equivalently
// bit/s/Hz), energy efficiency bit per joule.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

// Continuous power draw in watts to the per-symbol energy the model uses.
inline double watts_to_energy_per_symbol(double watts, double symbol_time) {
  return watts * symbol_time;
}

inline double energy_per_symbol_to_watts(double energy, double symbol_time) {
  return energy / symbol_time;
}

inline constexpr double kBitsPerMbit = 1e6;

}  // namespace eeopt
