// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jjaqed/circuit.hpp"
#include "jjaqed/spectral.hpp"

namespace jjaqed {

// Cubic atomic potential U_A = Lambda Phi_A^3 (J/Wb^3). The bookkeeping
// parameter lambda multiplies Lambda in the source and divides out of the
// correction, so only the product matters.
struct NonlinearConfig {
  double Lambda = 0.0;
  double lambda_scale = 1.0;
  Eigen::VectorXd initial;  // (Phi_red, Z0 Q_red), both in weber, length 2M
};

struct Trajectory {
  std::vector<double> t;  // dimensionless
  Eigen::MatrixXd phi;    // times x M, weber
  Eigen::MatrixXd q;      // times x M, Z0 Q in weber
  double strength = 0.0;  // Lambda Phi_typ^3 / (hbar omega_A)
};

double nonlinear_strength(const CircuitParams& p, const NonlinearConfig& nl);

Trajectory integrate_nonlinear_classical(const CircuitParams& p, const NonlinearConfig& nl,
                                         const std::vector<double>& t_grid);

// Lambda = 0 solution from the pole-residue expansion.
Trajectory linear_modal_trajectory(const CircuitParams& p, const Eigen::VectorXd& initial,
                                   const std::vector<double>& t_grid);

// Response to an arbitrary source sampled on a uniform grid, entering the
// atom row of d(Z0 Q)/dt~ (weber per unit dimensionless time).
Trajectory propagate_atom_source(const ReducedSystem& sys, const ModeSet& modes, const std::vector<double>& t_grid,
                                 const std::vector<double>& source);

Trajectory first_order_correction(const CircuitParams& p, const NonlinearConfig& nl, const Trajectory& linear);

}  // namespace jjaqed
