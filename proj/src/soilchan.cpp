#include "smol/soilchan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smol/errors.hpp"
#include "smol/rng.hpp"
#include "smol/sweepproto.hpp"

namespace smol::soilchan {
namespace {

constexpr double kNeperToDb = 20.0 / std::numbers::ln10;
constexpr double kCmToM = 0.01;

}  // namespace

void Dielectric::validate() const {
  if (!(real_part >= 1.0)) {
    throw ValidationError("permittivity real part must be >= 1, got " + std::to_string(real_part));
  }
  if (!(imag_part >= 0.0)) {
    throw ValidationError("permittivity loss factor must be >= 0, got " +
                          std::to_string(imag_part));
  }
}

void SoilState::validate() const {
  if (!(vwc >= 0.0 && porosity <= 1.0 && vwc <= porosity)) {
    throw ValidationError("soil state requires 0 <= vwc <= porosity <= 1 (vwc=" +
                          std::to_string(vwc) + ", porosity=" + std::to_string(porosity) + ")");
  }
  if (!allow_any_solid && !(solid_permittivity >= 3.0 && solid_permittivity <= 7.0)) {
    throw ValidationError("solid permittivity outside [3, 7]: " +
                          std::to_string(solid_permittivity));
  }
  if (!(solid_permittivity >= 1.0)) {
    throw ValidationError("solid permittivity must be >= 1");
  }
  water_permittivity.validate();
}

void LinkGeometry::validate() const {
  if (!(burial_depth_cm >= 0.0) || !(receiver_height_cm >= 0.0)) {
    throw ValidationError("burial depth and receiver height must be >= 0");
  }
  if (!(carrier_frequency_hz > 0.0)) {
    throw ValidationError("carrier frequency must be > 0");
  }
}

void NoiseModel::validate() const {
  if (!(rssi_sigma_db >= 0.0)) {
    throw ValidationError("rssi sigma must be >= 0");
  }
}

Dielectric mix_permittivity(const SoilState& soil) {
  soil.validate();
  const double solid_fraction = 1.0 - soil.porosity;
  const double air_fraction = soil.porosity - soil.vwc;
  const std::complex<double> root =
      solid_fraction * std::sqrt(std::complex<double>(soil.solid_permittivity, 0.0)) +
      air_fraction * 1.0 + soil.vwc * std::sqrt(soil.water_permittivity.as_complex());
  const std::complex<double> eps = root * root;
  // Rounding can push the mixed value a hair under vacuum for near-air mixes.
  return {std::max(eps.real(), 1.0), std::max(-eps.imag(), 0.0)};
}

double attenuation_constant(const Dielectric& eps, double frequency_hz) {
  eps.validate();
  if (!(frequency_hz > 0.0)) {
    throw ValidationError("frequency must be > 0");
  }
  if (eps.imag_part == 0.0) {
    return 0.0;
  }
  const double omega = 2.0 * std::numbers::pi * frequency_hz;
  const double ratio = eps.imag_part / eps.real_part;
  // sqrt(1 + r^2) - 1 written to avoid cancellation for small loss tangents.
  const double excess = ratio * ratio / (std::sqrt(1.0 + ratio * ratio) + 1.0);
  const double nepers = omega / kSpeedOfLight * std::sqrt(eps.real_part / 2.0 * excess);
  return nepers * kNeperToDb;
}

double free_space_loss_db(double wavelengths) {
  const double loss = 20.0 * std::log10(4.0 * std::numbers::pi * wavelengths);
  return std::max(loss, 0.0);
}

PathLossTerms path_loss_terms(const SoilState& soil, const LinkGeometry& geom) {
  geom.validate();
  if (geom.burial_depth_cm == 0.0 && geom.receiver_height_cm == 0.0) {
    throw ValidationError("path loss needs a non-zero distance between the radios");
  }
  const Dielectric eps = mix_permittivity(soil);
  const std::complex<double> index = std::sqrt(eps.as_complex());

  const double lambda0 = kSpeedOfLight / geom.carrier_frequency_hz;
  const double depth_m = geom.burial_depth_cm * kCmToM;
  const double height_m = geom.receiver_height_cm * kCmToM;

  PathLossTerms t;
  // Electrical length: the soil segment is index.real() times longer in wavelengths.
  t.spreading_db = free_space_loss_db((height_m + depth_m * index.real()) / lambda0);
  if (depth_m > 0.0) {
    t.absorption_db = attenuation_constant(eps, geom.carrier_frequency_hz) * depth_m;
    const double reflection = std::norm((index - 1.0) / (index + 1.0));
    t.interface_db = -10.0 * std::log10(1.0 - reflection);
  }
  t.total_db = t.spreading_db + t.absorption_db + t.interface_db;
  return t;
}

double synth_rssi(double tx_power_dbm, const SoilState& soil, const LinkGeometry& geom,
                  const NoiseModel& noise) {
  noise.validate();
  const double ceiling = tx_power_dbm + geom.total_gain_db();
  double rssi = ceiling - path_loss(soil, geom);
  if (noise.rssi_sigma_db > 0.0) {
    Rng rng(noise.seed);
    rssi += noise.rssi_sigma_db * rng.normal();
  }
  if (noise.quantize) {
    rssi = std::round(rssi);
  }
  return std::min(rssi, ceiling);
}

std::vector<CurvePoint> sweep_curve(const SoilState& soil, const LinkGeometry& geom,
                                    std::span<const int> powers_dbm, const NoiseModel& noise) {
  if (powers_dbm.empty()) {
    throw ValidationError("sweep needs at least one power level");
  }
  std::vector<CurvePoint> out;
  out.reserve(powers_dbm.size());
  for (std::size_t i = 0; i < powers_dbm.size(); ++i) {
    const int p = powers_dbm[i];
    if (p < sweepproto::kMinTxPowerDbm || p > sweepproto::kMaxTxPowerDbm) {
      throw ValidationError("tx power " + std::to_string(p) + " dBm outside device range");
    }
    NoiseModel packet_noise = noise;
    packet_noise.seed = derive_seed(noise.seed, i);
    out.push_back({p, synth_rssi(p, soil, geom, packet_noise)});
  }
  return out;
}

}  // namespace smol::soilchan
