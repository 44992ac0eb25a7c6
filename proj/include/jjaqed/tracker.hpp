// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jjaqed/circuit.hpp"
#include "jjaqed/spectral.hpp"

namespace jjaqed {

struct TrackOptions {
  double overlap_threshold = 0.5;
  double rel_tol = 1e-6;   // refinement stops when the final frequency moves less than this
  int max_doublings = 10;
  bool closed = false;     // track in the lossless atom + array system instead
};

struct AtomicModeTrace {
  std::vector<double> chi_grid;
  std::vector<cplx> frequencies;  // rad/s, Re >= 0, Im <= 0
  std::vector<double> overlaps;   // overlaps[i] belongs to chi_grid[i]; 1 at the seed
  Eigen::VectorXcd final_mode;
  cplx final_pole{};              // dimensionless s of the tracked pole
  double lamb_shift = 0.0;        // rad/s
  double decay = 0.0;             // rad/s
  double ipr = 1.0;
  int steps = 0;                  // step count of the accepted refinement level
};

AtomicModeTrace track_atomic_mode(const CircuitParams& p, double chi_target, int initial_steps,
                                  const TrackOptions& opt = {});

double ipr(const Eigen::VectorXcd& mode);

struct ChiRow {
  double chi;
  cplx omega;  // rad/s
};

// One continuous ramp through an ascending grid; each segment starts from the
// previous point's mode.
std::vector<ChiRow> sweep_chi(const CircuitParams& p, const std::vector<double>& chi_grid, int initial_steps,
                              const TrackOptions& opt = {});

struct BareFrequencyRow {
  double omega_A;
  std::vector<cplx> omegas;  // all pole representatives, rad/s, ascending real part
  int atomic_id = -1;        // index into omegas
  double ipr = 0.0;
};

std::vector<BareFrequencyRow> sweep_bare_frequency(const CircuitParams& p, const std::vector<double>& omega_grid,
                                                   int initial_steps, int workers, const TrackOptions& opt = {});

}  // namespace jjaqed
