#pragma once

// Reference computations that deliberately avoid the library's code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace smol::oracle {

inline constexpr double kC = 299'792'458.0;

/// Attenuation (dB/m) from the real part of the complex propagation constant
/// gamma = j * omega * sqrt(mu0 * eps0 * eps_r), eps_r = re - j * im.
inline double attenuation_db_per_m(double re, double im, double f) {
  const std::complex<double> eps(re, -im);
  const std::complex<double> gamma =
      std::complex<double>(0.0, 2.0 * std::numbers::pi * f / kC) * std::sqrt(eps);
  return std::abs(gamma.real()) * 20.0 * std::log10(std::exp(1.0));
}

inline double fspl_db(double distance_m, double f) {
  const double lambda = kC / f;
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m / lambda);
}

/// R^2 by explicit pairwise sums: SS_tot = sum_{i<j} (y_i - y_j)^2 / n.
inline double r_squared_brute(const std::vector<double>& y, const std::vector<double>& p) {
  const std::size_t n = y.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss_res += (y[i] - p[i]) * (y[i] - p[i]);
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) ss_tot += (y[i] - y[j]) * (y[i] - y[j]);
  }
  ss_tot /= static_cast<double>(n);
  return 1.0 - ss_res / ss_tot;
}

inline double mae_brute(const std::vector<double>& y, const std::vector<double>& p) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(static_cast<long double>(y[i]) - p[i]);
  return static_cast<double>(s / y.size());
}

inline unsigned xor_checksum(std::initializer_list<unsigned> bytes) {
  unsigned x = 0;
  for (const auto b : bytes) x ^= b;
  return x;
}

}  // namespace smol::oracle
