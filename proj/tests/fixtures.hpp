// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>

#include "jjaqed/circuit.hpp"
#include "jjaqed/constants.hpp"

namespace fixtures {

// Array parameters of the reference device with a 15 GHz charging energy.
inline jjaqed::CircuitParams device(int N, double chi, double f_A_ghz = 5.0, double T = 0.0) {
  jjaqed::CircuitParams p;
  p.N = N;
  p.chi = chi;
  p.E_C_A = jjaqed::constants::h * 15e9;
  p.omega_A = 2.0 * std::numbers::pi * f_A_ghz * 1e9;
  p.T = T;
  return p;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace fixtures
