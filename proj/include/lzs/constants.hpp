#pragma once

#include <numbers>

namespace lzs {

// Unit system: energy in eV, time in fs, length in nm, charge in e.
// Electric field is then V/nm == eV/(e nm) and current e/fs.
struct Constants {
  double hbar = 0.6582119569;        // eV fs
  double c = 299.792458;             // nm/fs
  double e = 1.0;                    // elementary charge
  double spin_degeneracy = 2.0;
};

inline constexpr Constants kConstants{};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;

}  // namespace lzs
