// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "jjaqed/dynamics.hpp"
#include "jjaqed/spectral.hpp"

namespace jjaqed {

struct BeatCandidate {
  double freq;  // |Im s_p + Im s_m|, dimensionless angular frequency
  int p;
  int m;
  double weight = 0.0;  // product of atom-row residue weights, relative to the largest pair
};

struct BeatPeak {
  double freq;
  double magnitude;
  bool matched = false;
  BeatCandidate match{0.0, -1, -1, 0.0};
};

struct BeatSpectrum {
  std::vector<double> freq;       // zero-padded grid, dimensionless angular frequency
  std::vector<double> magnitude;
  double bin_width = 0.0;         // native resolution 2 pi / (n dt)
  double floor = 0.0;             // median magnitude
  std::vector<BeatPeak> peaks;
  std::vector<BeatCandidate> candidates;
};

// Pole pairs whose beat can show up in n_A: both poles visible in the atom row
// and not yet decayed over the trace length.
std::vector<BeatCandidate> beat_candidates(const ModeSet& modes, int atom_index, double t_span);

BeatSpectrum beat_spectrum(const DynamicsTrace& trace, const ModeSet& modes, int atom_index = 0);

}  // namespace jjaqed
