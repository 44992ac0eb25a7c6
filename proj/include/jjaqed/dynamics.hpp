// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jjaqed/circuit.hpp"
#include "jjaqed/spectral.hpp"

namespace jjaqed {

// eta(p, q) = (R_p)_{j,q} and zeta(p, q) = s_p (C_red R_p)_{j,q} for the
// observation node j. Rows of defective poles are zero.
struct EtaZeta {
  Eigen::MatrixXcd eta;   // P x M
  Eigen::MatrixXcd zeta;  // P x M
  int excluded = 0;
};

EtaZeta eta_zeta(const ModeSet& modes, const ReducedSystem& sys, int observe_node);

// Z_A = sqrt(L_A' / C_A''), with C_A'' from the closed-array capacitance
// inverse (identical to the mode sum).
double atomic_impedance(const CircuitParams& p);

enum class DynamicsMethod { Modal, Oracle };

struct DynamicsTrace {
  std::vector<double> t;             // dimensionless time Omega0 t
  std::vector<double> n_A;
  std::vector<double> part_initial;  // flux initial condition
  std::vector<double> part_vacuum;   // charge initial condition
  std::vector<double> part_thermal;  // waveguide noise
  double n_A_inf = 0.0;
  DynamicsMethod method = DynamicsMethod::Modal;
  double max_imag = 0.0;             // largest |Im| discarded from the modal sums
  double hbar_omega0_over_kT = 0.0;  // infinite at T = 0
  double slowest_decay = 0.0;        // dimensionless, among atom-visible damped poles
  double atom_decay = 0.0;           // dimensionless, pole with the largest atom amplitude
  std::vector<std::string> warnings;
};

// Everything the pole sums need, computed once per circuit.
struct ModalModel {
  ReducedSystem sys;
  ModeSet modes;
  EtaZeta atom;
  double Z_A = 0.0;
  double T = 0.0;
  double thermal_prefactor = 0.0;  // k_B T Z0^2 / (hbar Omega0 Z_A Z_W)
};

ModalModel build_modal_model(const CircuitParams& p);

DynamicsTrace atom_occupation_modal(const ModalModel& model, const std::vector<double>& t_grid);
DynamicsTrace atom_occupation_modal(const CircuitParams& p, const std::vector<double>& t_grid, double T);

double steady_state(const ModalModel& model);
double steady_state(const CircuitParams& p, double T);

// Second moments of (Phi, Z0 Q) propagated exactly over each grid step with
// the matrix exponential of the drift (Van Loan block form).
DynamicsTrace covariance_ode_oracle(const CircuitParams& p, const std::vector<double>& t_grid, double T);

// Oracle occupation averaged over `samples` points spaced `dt` apart starting
// at t_start; the far time is reached by repeated squaring of the propagator.
double oracle_long_time_average(const CircuitParams& p, double T, double t_start, double dt, int samples);

}  // namespace jjaqed
