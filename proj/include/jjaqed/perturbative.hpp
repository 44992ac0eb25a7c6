// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "jjaqed/circuit.hpp"
#include "jjaqed/coupling.hpp"
#include "jjaqed/spectral.hpp"

namespace jjaqed {

// Impedance seen by the atom through the coupler, array and waveguide (ohm).
// Returns an infinite value when chi = 0: the atom is disconnected.
cplx z_eff(const CircuitParams& p, double omega);

// Same recursion with an explicit number of array nodes; n_nodes = 0 gives
// Z_ext = Z_W + 1/(i omega C_c).
cplx z_eff_nodes(const CircuitParams& p, double omega, int n_nodes);

cplx z_infinity(const CircuitParams& p, double omega);

// Gamma = Re[1/Z(omega_A)] / (2 pi C_A), with Z_eff or Z_inf.
double purcell_pt(const CircuitParams& p, bool use_infinite);

double lamb_shift_pt2(const CouplingSet& cs);

struct ImpedanceProfile {
  std::vector<double> omega;
  std::vector<cplx> Z_eff;
  std::vector<cplx> Z_inf;
};

ImpedanceProfile impedance_profile(const CircuitParams& p, const std::vector<double>& omega_grid);

}  // namespace jjaqed
