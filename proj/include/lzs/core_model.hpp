#pragma once

#include <string_view>

#include "lzs/constants.hpp"

namespace lzs {

/// Two-band linear crossing: gap Delta (eV) and Fermi velocity v_F (nm/fs).
struct MaterialSpec {
  double gap = 0.0;
  double fermi_velocity = 1.0;

  void validate() const;
};

/// Carrier photon energy (eV) and peak field (V/nm).
struct DriveParams {
  double photon_energy = 1.55;
  double peak_field = 1.0;

  double angular_frequency(const Constants& k = kConstants) const {
    return photon_energy / k.hbar;
  }
  void validate() const;
};

enum class Regime {
  PerturbativeMultiphoton,
  ImpulsiveLZ,
  NonImpulsiveLZ,
  Adiabatic,
  AdiabaticImpulsiveLZS,
};

std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

/// Boundaries of the regime cascade. The dashed lines in a gamma-M map carry no
/// band widths, so these are exposed rather than hard coded.
struct RegimeThresholds {
  double gamma_boundary = 1.0;
  double z_r_boundary = 1.0;
  double p_hi = 0.9;
  double p_lo = 0.1;
  double relativistic_gamma = 0.007;
};

struct AdiabaticityReport {
  double gamma = 0.0;            // Keldysh parameter
  double m_photon = 0.0;         // M = Delta / (hbar omega)
  double z_r = 0.0;              // 2 Omega_R / omega
  double delta_lz = 0.0;
  double p_lz = 1.0;
  double rabi_freq = 0.0;        // Omega_R, 1/fs
  double transition_time = 0.0;  // 2 pi / (2 Omega_R), fs
  double sweep_rate = 0.0;       // alpha0 = 2 v_F e E0, eV/fs
  double eff_mass = 0.0;         // Delta / (4 v_F^2), eV fs^2 / nm^2
  double a0 = 0.0;               // v_F / (gamma c)
  Regime regime = Regime::PerturbativeMultiphoton;
  bool relativistic_flag = false;
};

AdiabaticityReport compute_report(const MaterialSpec& mat, const DriveParams& drive,
                                  const RegimeThresholds& thresholds = {},
                                  const Constants& k = kConstants);

Regime classify_regime(const AdiabaticityReport& report,
                       const RegimeThresholds& thresholds = {});

/// True when gamma drops below the relativistic threshold (strict).
bool relativistic_boundary(const AdiabaticityReport& report,
                           const RegimeThresholds& thresholds = {});

/// Material and drive that realize a (gamma, M) working point at fixed photon
/// energy: Delta = M hbar omega, E0 = omega Delta / (2 v_F e gamma).
struct WorkingPoint {
  MaterialSpec material;
  DriveParams drive;
};

WorkingPoint working_point(double gamma, double m_photon, double photon_energy,
                           double fermi_velocity, const Constants& k = kConstants);

}  // namespace lzs
