// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "jjaqed/circuit.hpp"

namespace jjaqed {

using cplx = std::complex<double>;

// Poles s_p of Q(s) = s^2 C_red + s D + L_red_inv together with the rank-one
// residues R_p = v_p u_p^H / (u_p^H Q'(s_p) v_p). Residues are kept in factored
// form; `residue(p)` materializes one on demand.
struct ModeSet {
  std::vector<cplx> poles;
  Eigen::MatrixXcd right_vectors;  // M x P, unit columns
  Eigen::MatrixXcd left_vectors;   // M x P, unit columns (empty without residues)
  std::vector<cplx> denominators;  // u^H Q'(s) v
  std::vector<double> residual_norms;
  std::vector<bool> defective;     // excluded from expansions
  int merged = 0;                  // poles dropped by deduplication
  bool has_residues = false;

  int size() const { return static_cast<int>(poles.size()); }
  Eigen::MatrixXcd residue(int p) const;
  cplx residue_entry(int p, int i, int j) const {
    return right_vectors(i, p) * std::conj(left_vectors(j, p)) / denominators[p];
  }
};

struct SolveOptions {
  bool residues = true;
  int newton_steps = 2;
};

ModeSet solve_quadratic_modes(const ReducedSystem& sys, const SolveOptions& opt = {});

Eigen::MatrixXcd evaluate_Q(const ReducedSystem& sys, cplx s);
Eigen::MatrixXcd evaluate_dQ(const ReducedSystem& sys, cplx s);

struct SingularTriplet {
  double sigma;
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;
};

// Smallest singular triplet of a (nearly singular) square matrix by inverse
// iteration on Q^H Q, seeded with `start`.
SingularTriplet smallest_singular_triplet(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& start);

// Dimensionless complex frequency of a pole: Re = |Im s|, Im = Re s <= 0.
cplx omega_of_pole(cplx s);

struct JJAModeSet {
  Eigen::VectorXd frequencies;  // rad/s, ascending
  Eigen::MatrixXd modes;        // N x N, columns normalized to Phi^T C Phi = C_g + 2C
};

JJAModeSet solve_closed_jja_modes(const ClosedJJA& jja);

enum class BoundaryCondition { NN, DN };

double analytic_dispersion(int k, BoundaryCondition bc, const CircuitParams& p);
double analytic_mode(int k, int n, BoundaryCondition bc, const CircuitParams& p);

}  // namespace jjaqed
