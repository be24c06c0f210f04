#include "lzs/core_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lzs/errors.hpp"

namespace lzs {

void MaterialSpec::validate() const {
  if (!(gap >= 0.0) || !std::isfinite(gap))
    throw ValidationError("material gap must be finite and >= 0, got " + std::to_string(gap));
  if (!(fermi_velocity > 0.0) || !std::isfinite(fermi_velocity))
    throw ValidationError("fermi_velocity must be > 0, got " + std::to_string(fermi_velocity));
}

void DriveParams::validate() const {
  if (!(photon_energy > 0.0) || !std::isfinite(photon_energy))
    throw ValidationError("photon_energy must be > 0, got " + std::to_string(photon_energy));
  if (!(peak_field > 0.0) || !std::isfinite(peak_field))
    throw ValidationError("peak_field must be > 0, got " + std::to_string(peak_field));
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::PerturbativeMultiphoton: return "PerturbativeMultiphoton";
    case Regime::ImpulsiveLZ: return "ImpulsiveLZ";
    case Regime::NonImpulsiveLZ: return "NonImpulsiveLZ";
    case Regime::Adiabatic: return "Adiabatic";
    case Regime::AdiabaticImpulsiveLZS: return "AdiabaticImpulsiveLZS";
  }
  return "?";
}

Regime regime_from_string(std::string_view s) {
  for (Regime r : {Regime::PerturbativeMultiphoton, Regime::ImpulsiveLZ, Regime::NonImpulsiveLZ,
                   Regime::Adiabatic, Regime::AdiabaticImpulsiveLZS}) {
    if (to_string(r) == s) return r;
  }
  throw ValidationError("unknown regime label '" + std::string(s) + "'");
}

AdiabaticityReport compute_report(const MaterialSpec& mat, const DriveParams& drive,
                                  const RegimeThresholds& thresholds, const Constants& k) {
  mat.validate();
  drive.validate();

  const double omega = drive.angular_frequency(k);
  const double vf = mat.fermi_velocity;
  const double coupling = vf * k.e * drive.peak_field;  // eV/fs

  AdiabaticityReport r;
  r.rabi_freq = coupling / drive.photon_energy;
  r.gamma = omega * mat.gap / (2.0 * coupling);
  r.m_photon = mat.gap / drive.photon_energy;
  r.z_r = 2.0 * r.rabi_freq / omega;
  r.delta_lz = mat.gap * mat.gap / (8.0 * k.hbar * coupling);
  r.p_lz = std::exp(-2.0 * kPi * r.delta_lz);
  r.transition_time = 2.0 * kPi / (2.0 * r.rabi_freq);
  r.sweep_rate = 2.0 * coupling;
  r.eff_mass = mat.gap / (4.0 * vf * vf);
  r.a0 = r.gamma > 0.0 ? vf / (r.gamma * k.c) : std::numeric_limits<double>::infinity();
  r.regime = classify_regime(r, thresholds);
  r.relativistic_flag = relativistic_boundary(r, thresholds);
  return r;
}

Regime classify_regime(const AdiabaticityReport& report, const RegimeThresholds& t) {
  if (report.gamma >= t.gamma_boundary) return Regime::PerturbativeMultiphoton;
  if (report.z_r < t.z_r_boundary) return Regime::NonImpulsiveLZ;
  if (report.p_lz >= t.p_hi) return Regime::ImpulsiveLZ;
  if (report.p_lz <= t.p_lo) return Regime::Adiabatic;
  return Regime::AdiabaticImpulsiveLZS;
}

bool relativistic_boundary(const AdiabaticityReport& report, const RegimeThresholds& t) {
  return report.gamma < t.relativistic_gamma;
}

WorkingPoint working_point(double gamma, double m_photon, double photon_energy,
                           double fermi_velocity, const Constants& k) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma must be > 0 (E0 > 0), got " + std::to_string(gamma));
  if (!(m_photon > 0.0) || !std::isfinite(m_photon))
    throw ValidationError("M must be > 0, got " + std::to_string(m_photon));
  WorkingPoint wp;
  wp.material.gap = m_photon * photon_energy;
  wp.material.fermi_velocity = fermi_velocity;
  wp.drive.photon_energy = photon_energy;
  const double omega = photon_energy / k.hbar;
  wp.drive.peak_field = omega * wp.material.gap / (2.0 * fermi_velocity * k.e * gamma);
  wp.material.validate();
  wp.drive.validate();
  return wp;
}

}  // namespace lzs
