// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include <Eigen/Dense>

namespace jjaqed {

// Physical element values in SI. E_C_A is an energy in joule; omega_A is an
// angular frequency in rad/s. C_W is the ground capacitance of the retained
// waveguide node and defaults to zero.
struct CircuitParams {
  int N = 1000;
  double L = 1e-9;
  double C = 150e-15;
  double C_g = 0.1e-15;
  double C_c = 100e-15;
  double C_W = 0.0;
  double chi = 1.0;
  double E_C_A = 0.0;
  double omega_A = 0.0;
  double Z_W = 50.0;
  double T = 0.0;
};

// Throws a domain error on any violated parameter invariant.
void validate(const CircuitParams& p);

struct AtomElements {
  double C_A;
  double L_A;
};

AtomElements derive_atom_elements(double E_C_A, double omega_A);

double plasma_frequency(const CircuitParams& p);         // Omega0 = 1/sqrt(LC)
double characteristic_impedance(const CircuitParams& p); // Z0 = sqrt(L/C)
double band_edge(const CircuitParams& p);                // omega_c = 1/sqrt(L(C_g/2 + C))

// Dimensionless reduced-subspace matrices: capacitances in units of C,
// inverse inductances in units of 1/L. Node 0 is the atom, 1..N the array,
// N+1 the first waveguide node when the system is open.
struct ReducedSystem {
  int M = 0;
  Eigen::MatrixXd C_red;
  Eigen::MatrixXd L_red_inv;
  double Z0 = 0.0;
  double Omega0 = 0.0;
  int atom_index = 0;
  std::optional<int> boundary_index;
  double damping = 0.0;  // Z0 / Z_W on the boundary diagonal, 0 when closed

  Eigen::MatrixXd damping_matrix() const;
};

ReducedSystem build_reduced_system(const CircuitParams& p);

// Atom plus array with C_c -> 0 and no waveguide node (lossless).
ReducedSystem build_closed_system(const CircuitParams& p);

struct ClosedJJA {
  Eigen::MatrixXd C;      // units of C
  Eigen::MatrixXd L_inv;  // units of 1/L
  double Omega0 = 0.0;
  double c_norm = 0.0;    // (C_g + 2C)/C, the mode normalization target
};

ClosedJJA build_closed_jja(const CircuitParams& p);

}  // namespace jjaqed
