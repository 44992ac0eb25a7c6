// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "jjaqed/errors.hpp"

namespace jjaqed {

namespace {
constexpr double kResolvedWeight = 1e-3;
}  // namespace

std::vector<BeatCandidate> beat_candidates(const ModeSet& modes, int atom_index, double t_span) {
  if (!modes.has_residues) fail(ErrorKind::Domain, "beat candidates need residues");
  const int P = modes.size();
  std::vector<double> weight(P, 0.0);
  double wmax = 0.0;
  for (int p = 0; p < P; ++p) {
    if (modes.defective[p]) continue;
    weight[p] = std::abs(modes.right_vectors(atom_index, p) / modes.denominators[p]);
    wmax = std::max(wmax, weight[p]);
  }
  std::vector<int> live;
  for (int p = 0; p < P; ++p) {
    if (weight[p] > 1e-8 * wmax && -modes.poles[p].real() * t_span < 30.0) live.push_back(p);
  }
  std::vector<BeatCandidate> out;
  for (std::size_t i = 0; i < live.size(); ++i) {
    for (std::size_t j = i; j < live.size(); ++j) {
      const int p = live[i], m = live[j];
      out.push_back({std::abs(modes.poles[p].imag() + modes.poles[m].imag()), p, m,
                     weight[p] * weight[m] / (wmax * wmax)});
    }
  }
  std::sort(out.begin(), out.end(), [](const BeatCandidate& a, const BeatCandidate& b) { return a.freq < b.freq; });
  return out;
}

BeatSpectrum beat_spectrum(const DynamicsTrace& trace, const ModeSet& modes, int atom_index) {
  const std::size_t n = trace.t.size();
  if (n < 8) fail(ErrorKind::Resolution, "trace too short for a spectrum");
  const double dt = trace.t[1] - trace.t[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((trace.t[i] - trace.t[i - 1]) - dt) > 1e-9 * dt) fail(ErrorKind::Domain, "beat spectrum needs a uniform grid");
  }
  const double span = trace.t.back() - trace.t.front();

  BeatSpectrum out;
  out.candidates = beat_candidates(modes, atom_index, span);
  // Only beats with appreciable weight set the resolution requirement; the
  // nearly flat band edge produces many tiny splittings nobody can see.
  double smallest = 0.0;
  for (const auto& c : out.candidates) {
    if (c.freq > 1e-12 && c.weight >= kResolvedWeight) {
      smallest = c.freq;
      break;
    }
  }
  if (smallest > 0.0 && span < 20.0 * 2.0 * std::numbers::pi / smallest) {
    std::ostringstream os;
    os << "trace spans " << span << " but 20 periods of the smallest expected beat (" << smallest << ") need "
       << 20.0 * 2.0 * std::numbers::pi / smallest;
    fail(ErrorKind::Resolution, os.str());
  }

  double mean = 0.0;
  for (double v : trace.n_A) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t npad = 4 * n;
  std::vector<double> in(npad, 0.0);
  for (std::size_t i = 0; i < n; ++i) in[i] = trace.n_A[i] - mean;
  const std::size_t nout = npad / 2 + 1;
  fftw_complex* spec = fftw_alloc_complex(nout);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(npad), in.data(), spec, FFTW_ESTIMATE);
  fftw_execute(plan);
  out.freq.resize(nout);
  out.magnitude.resize(nout);
  for (std::size_t k = 0; k < nout; ++k) {
    out.freq[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(npad) * dt);
    out.magnitude[k] = std::hypot(spec[k][0], spec[k][1]) * dt;
  }
  fftw_destroy_plan(plan);
  fftw_free(spec);

  out.bin_width = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  std::vector<double> sorted = out.magnitude;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  out.floor = sorted[sorted.size() / 2];

  // A peak must dominate one native bin on either side; this rejects the
  // sidelobes of the rectangular window, which are spaced one native bin apart.
  const int half = 4;
  for (int k = 1; k + 1 < static_cast<int>(nout); ++k) {
    const double v = out.magnitude[k];
    if (!(v > 10.0 * out.floor)) continue;
    bool is_max = true;
    for (int j = std::max(0, k - half); j <= std::min(static_cast<int>(nout) - 1, k + half); ++j) {
      if (j != k && out.magnitude[j] >= v) {
        is_max = false;
        break;
      }
    }
    if (!is_max) continue;
    BeatPeak pk{out.freq[k], v};
    double best = 1e300;
    for (const auto& c : out.candidates) {
      const double d = std::abs(c.freq - pk.freq);
      if (d < best) {
        best = d;
        pk.match = c;
      }
    }
    pk.matched = best <= 2.0 * out.bin_width;
    out.peaks.push_back(pk);
  }
  return out;
}

}  // namespace jjaqed
