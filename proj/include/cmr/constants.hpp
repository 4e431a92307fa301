#pragma once

#include <numbers>

namespace cmr {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// electron charge [C] and Planck constant [J s]
inline constexpr double e_charge = 1.602176634e-19;
inline constexpr double h_planck = 6.62607015e-34;

// Charging energy of a shunt capacitance, E_C = e^2 / (2 C h), returned in GHz
// (ordinary frequency). C in fF.
inline constexpr double ec_ghz_from_cap_fF(double c_fF) {
    return e_charge * e_charge / (2.0 * c_fF * 1e-15 * h_planck) * 1e-9;
}

inline constexpr double cap_fF_from_ec_ghz(double ec_ghz) {
    return e_charge * e_charge / (2.0 * ec_ghz * 1e9 * h_planck) * 1e15;
}

} // namespace cmr
