// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

namespace jjaqed {

// psi_1(z) for Re z > 0, absolute accuracy ~1e-13 in that half plane.
std::complex<double> trigamma(std::complex<double> z);

// Symmetrized waveguide charge-noise correlation at time separation dt (s):
// (k_B T)^2 / (2 pi hbar Z_W) * Re psi_1(1 - i dt k_B T / hbar).
double noise_correlation(double dt, double T, double Z_W);

}  // namespace jjaqed
