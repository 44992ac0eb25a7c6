// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jjaqed/circuit.hpp"
#include "jjaqed/spectral.hpp"

namespace jjaqed {

// Closed-system Hamiltonian data in SI (rad/s, ohm, farad). Mode index k runs
// over all N closed-array modes in ascending frequency.
struct CouplingSet {
  double chi = 0.0;
  double Omega0 = 0.0;
  double c_jja = 0.0;          // C_g + 2C
  double C_A_prime = 0.0;      // C_A + C0
  double L_A_prime = 0.0;      // (1/L_A + 1/L0)^-1
  double C_A_dprime = 0.0;
  double omega_A_prime = 0.0;
  double omega_A_dprime = 0.0;
  double Z_A = 0.0;
  double sum_phi1_sq = 0.0;    // sum_k Phi_k(1)^2
  Eigen::VectorXd phi1;        // Phi_k(1)
  Eigen::VectorXd omega_k;
  Eigen::VectorXd omega_k_prime;
  Eigen::VectorXd Z_k;
  Eigen::VectorXd g_phi;
  Eigen::VectorXd g_q;
  Eigen::MatrixXd xi;
  Eigen::VectorXd fsr;
  std::vector<char> regimes;   // 'A', 'B' or 'C'

  int K() const { return static_cast<int>(omega_k.size()); }
};

CouplingSet build_coupling_set(const CircuitParams& p, const JJAModeSet& modes);

// The two coupling formulas on their own, so the chi-scaling can be checked
// with mode shapes and C_A'' held fixed.
double flux_coupling(double chi, double L, double Z_A, double Z_k, double phi1);
double charge_coupling(double chi, double C, double c_jja, double C_A_dprime, double Z_A, double Z_k, double phi1);

Eigen::VectorXd free_spectral_range(const Eigen::VectorXd& omega_k_prime);
std::vector<char> classify_regimes(const CouplingSet& cs, const Eigen::VectorXd& fsr);

struct TruncatedSpectrum {
  Eigen::VectorXd frequencies;  // all normal-mode frequencies of H(k_max), rad/s, ascending
  double atomic = 0.0;          // branch with the largest atom amplitude
  double atom_weight = 0.0;
};

TruncatedSpectrum diagonalize_truncated(const CouplingSet& cs, int k_max);

}  // namespace jjaqed
