#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace smol::soilchan {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kDefaultFrequencyHz = 915e6;

/// Complex relative permittivity, written eps = real_part - j * imag_part.
struct Dielectric {
  double real_part = 1.0;
  double imag_part = 0.0;

  /// Throws ValidationError unless real_part >= 1 and imag_part >= 0.
  void validate() const;
  std::complex<double> as_complex() const { return {real_part, -imag_part}; }

  friend bool operator==(const Dielectric&, const Dielectric&) = default;
};

inline constexpr Dielectric kAir{1.0, 0.0};
/// Water at 915 MHz; the loss factor carries the moisture-dependent absorption.
inline constexpr Dielectric kWater{80.0, 4.5};

struct SoilState {
  double vwc = 0.0;       // fraction of total volume
  double porosity = 0.45;  // fraction of total volume
  double solid_permittivity = 5.0;
  Dielectric water_permittivity = kWater;
  /// Permit solid_permittivity outside the [3, 7] range of mineral soils.
  bool allow_any_solid = false;

  void validate() const;

  static SoilState pure_air() { return {.vwc = 0.0, .porosity = 1.0}; }
  static SoilState pure_water() { return {.vwc = 1.0, .porosity = 1.0}; }
};

/// One measurement scenario. Lengths are in centimeters.
struct LinkGeometry {
  double burial_depth_cm = 15.0;
  double receiver_height_cm = 0.0;
  double carrier_frequency_hz = kDefaultFrequencyHz;
  double tx_antenna_gain_db = 0.0;
  double rx_antenna_gain_db = 0.0;

  void validate() const;
  double total_gain_db() const { return tx_antenna_gain_db + rx_antenna_gain_db; }
};

struct NoiseModel {
  double rssi_sigma_db = 2.0;
  bool quantize = true;  // round to integer dBm like commodity radios
  std::uint64_t seed = 0;

  void validate() const;
  static NoiseModel none() { return {.rssi_sigma_db = 0.0, .quantize = false, .seed = 0}; }
};

/// Effective permittivity by complex refractive index mixing of solid, air
/// and water phases. Throws ValidationError when vwc > porosity.
Dielectric mix_permittivity(const SoilState& soil);

/// Plane-wave attenuation of a lossy medium in dB per meter.
double attenuation_constant(const Dielectric& eps, double frequency_hz);

/// Free-space loss 20 log10(4 pi d / lambda) for a path of `wavelengths`
/// wavelengths, clamped at 0 dB in the near field.
double free_space_loss_db(double wavelengths);

/// Breakdown of path_loss; the three terms sum to `total_db`.
struct PathLossTerms {
  double spreading_db = 0.0;
  double absorption_db = 0.0;
  double interface_db = 0.0;
  double total_db = 0.0;
};

PathLossTerms path_loss_terms(const SoilState& soil, const LinkGeometry& geom);

/// Buried transmitter to above-ground receiver loss in dB. Throws
/// ValidationError when depth and height are both zero.
inline double path_loss(const SoilState& soil, const LinkGeometry& geom) {
  return path_loss_terms(soil, geom).total_db;
}

/// RSSI in dBm for one packet sent at `tx_power_dbm`. One noise draw from a
/// generator seeded by `noise.seed`; never exceeds tx power plus gains.
double synth_rssi(double tx_power_dbm, const SoilState& soil, const LinkGeometry& geom,
                  const NoiseModel& noise);

struct CurvePoint {
  int tx_power_dbm = 0;
  double rssi_dbm = 0.0;
};

/// One packet per requested power, in request order. Packet i draws its
/// noise from a seed derived from (noise.seed, i).
std::vector<CurvePoint> sweep_curve(const SoilState& soil, const LinkGeometry& geom,
                                    std::span<const int> powers_dbm, const NoiseModel& noise);

}  // namespace smol::soilchan
