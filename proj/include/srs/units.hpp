#pragma once

#include <cmath>
#include <numbers>

namespace srs {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTera = 1e12;
inline constexpr double kGiga = 1e9;

/// Factor turning a natural-log quantity (nepers of power) into dB.
inline const double kNeperToDb = 10.0 / std::numbers::ln10;

inline double thz(double value) { return value * kTera; }
inline double to_thz(double hz) { return hz / kTera; }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

/// dB/km to natural-unit power attenuation in 1/m.
inline double db_per_km_to_per_m(double db_per_km) {
  return db_per_km / (10.0 * std::log10(std::numbers::e)) / 1000.0;
}
inline double per_m_to_db_per_km(double per_m) {
  return per_m * (10.0 * std::log10(std::numbers::e)) * 1000.0;
}

inline double wavelength_um(double frequency_hz) { return kSpeedOfLight / frequency_hz * 1e6; }
inline double frequency_hz_from_um(double wavelength_um) { return kSpeedOfLight / (wavelength_um * 1e-6); }

}  // namespace srs
