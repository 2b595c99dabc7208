#pragma once

namespace qpm {

// Internal unit system: lengths in nm, wavevectors in rad/nm, time in fs.
// SI is used only inside the pair-rate module.
inline constexpr double c_nm_per_fs = 299.792458;
inline constexpr double c_m_per_s = 299792458.0;
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

} // namespace qpm
