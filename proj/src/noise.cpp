// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/noise.hpp"

#include <numbers>

#include "jjaqed/constants.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

std::complex<double> trigamma(std::complex<double> z) {
  std::complex<double> acc = 0.0;
  while (std::abs(z) <= 10.0) {
    acc += 1.0 / (z * z);
    z += 1.0;
  }
  // psi_1(z) ~ 1/z + 1/(2z^2) + sum_k B_2k / z^(2k+1)
  const std::complex<double> w = 1.0 / z;
  const std::complex<double> w2 = w * w;
  static constexpr double B[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0,
                                 7.0 / 6.0};
  std::complex<double> series = 0.0;
  for (int k = 6; k >= 0; --k) series = series * w2 + B[k];
  return acc + w + 0.5 * w2 + series * w2 * w;
}

double noise_correlation(double dt, double T, double Z_W) {
  if (!(T > 0.0)) fail(ErrorKind::Domain, "noise correlation needs T > 0");
  if (!(Z_W > 0.0)) fail(ErrorKind::Domain, "noise correlation needs Z_W > 0");
  const double kT = constants::k_B * T;
  const double y = dt * kT / constants::hbar;
  return kT * kT / (2.0 * std::numbers::pi * constants::hbar * Z_W) * trigamma({1.0, -y}).real();
}

}  // namespace jjaqed
