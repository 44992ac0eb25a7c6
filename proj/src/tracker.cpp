// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "jjaqed/errors.hpp"
#include "jjaqed/parallel.hpp"

namespace jjaqed {

namespace {

// Pole representatives with Im s >= 0 and their unit right vectors.
struct Snapshot {
  std::vector<cplx> poles;
  Eigen::MatrixXcd vectors;
};

Snapshot solve_snapshot(const CircuitParams& p, double chi, bool closed) {
  CircuitParams q = p;
  q.chi = chi;
  const ReducedSystem sys = closed ? build_closed_system(q) : build_reduced_system(q);
  SolveOptions so;
  so.residues = false;
  const ModeSet ms = solve_quadratic_modes(sys, so);
  std::vector<int> keep;
  for (int i = 0; i < ms.size(); ++i) {
    if (ms.poles[i].imag() >= 0.0) keep.push_back(i);
  }
  Snapshot snap;
  snap.vectors.resize(sys.M, static_cast<int>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    snap.poles.push_back(ms.poles[keep[j]]);
    snap.vectors.col(static_cast<int>(j)) = ms.right_vectors.col(keep[j]);
  }
  return snap;
}

struct Level {
  bool ok = true;
  double bad_chi = 0.0;
  double bad_overlap = 0.0;
  std::vector<double> chis;
  std::vector<cplx> poles;
  std::vector<double> overlaps;
  Eigen::VectorXcd mode;
};

// Linear ramp chi_from -> chi_to with solves cached on the finest nested grid.
class Ramp {
 public:
  Ramp(const CircuitParams& p, double from, double to, Eigen::VectorXcd seed, int initial_steps,
       const TrackOptions& opt)
      : p_(p), from_(from), to_(to), seed_(std::move(seed)), opt_(opt),
        finest_(static_cast<long>(initial_steps) << opt.max_doublings) {}

  Level run(int n) {
    Level lv;
    Eigen::VectorXcd prev = seed_;
    const long stride = finest_ / n;
    for (int i = 1; i <= n; ++i) {
      const long idx = i * stride;
      const double chi = from_ + (to_ - from_) * static_cast<double>(idx) / static_cast<double>(finest_);
      const Snapshot& snap = at(idx, chi);
      const Eigen::VectorXd ov = (snap.vectors.adjoint() * prev).cwiseAbs();
      Eigen::Index best = 0;
      const double o = ov.maxCoeff(&best);
      lv.chis.push_back(chi);
      lv.poles.push_back(snap.poles[best]);
      lv.overlaps.push_back(o);
      if (!(o > opt_.overlap_threshold)) {
        lv.ok = false;
        lv.bad_chi = chi;
        lv.bad_overlap = o;
        return lv;
      }
      prev = snap.vectors.col(best);
    }
    lv.mode = prev;
    return lv;
  }

 private:
  const Snapshot& at(long idx, double chi) {
    auto it = cache_.find(idx);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(idx, solve_snapshot(p_, chi, opt_.closed)).first->second;
  }

  CircuitParams p_;
  double from_, to_;
  Eigen::VectorXcd seed_;
  TrackOptions opt_;
  long finest_;
  std::map<long, Snapshot> cache_;
};

Level ramp_adaptive(const CircuitParams& p, double from, double to, const Eigen::VectorXcd& seed,
                    int initial_steps, const TrackOptions& opt, int* steps_used) {
  if (initial_steps < 1) fail(ErrorKind::Domain, "initial_steps must be at least 1");
  Ramp ramp(p, from, to, seed, initial_steps, opt);
  Level prev;
  bool have_prev = false;
  Level last;
  int n = initial_steps;
  for (int d = 0; d <= opt.max_doublings; ++d, n *= 2) {
    last = ramp.run(n);
    *steps_used = n;
    if (!last.ok) {
      have_prev = false;
      continue;
    }
    if (have_prev) {
      const cplx a = prev.poles.back(), b = last.poles.back();
      if (std::abs(b - a) < opt.rel_tol * std::max(std::abs(a), 1e-300)) return last;
    }
    prev = last;
    have_prev = true;
  }
  if (!last.ok) {
    std::ostringstream os;
    os.precision(10);
    os << "no pole overlaps the atomic branch by more than " << opt.overlap_threshold << " at chi=" << last.bad_chi
       << " (best overlap " << last.bad_overlap << ") after " << opt.max_doublings << " refinements";
    throw TrackingError(last.bad_chi, os.str());
  }
  return last;
}

Eigen::VectorXcd atom_delta(const CircuitParams& p, bool closed) {
  const int M = closed ? p.N + 1 : p.N + 2;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(M);
  v(0) = 1.0;
  return v;
}

}  // namespace

double ipr(const Eigen::VectorXcd& mode) {
  if (std::abs(mode.norm() - 1.0) > 1e-8) fail(ErrorKind::Domain, "ipr expects a unit-normalized mode");
  return mode.cwiseAbs2().cwiseAbs2().sum();
}

AtomicModeTrace track_atomic_mode(const CircuitParams& p, double chi_target, int initial_steps,
                                  const TrackOptions& opt) {
  validate(p);
  if (!(chi_target >= 0.0)) fail(ErrorKind::Domain, "chi_target must be non-negative");
  const double Omega0 = plasma_frequency(p);
  const double omega_A = p.omega_A;

  AtomicModeTrace tr;
  tr.chi_grid.push_back(0.0);
  tr.frequencies.emplace_back(omega_A, 0.0);
  tr.overlaps.push_back(1.0);
  tr.final_mode = atom_delta(p, opt.closed);
  tr.final_pole = cplx(0.0, omega_A / Omega0);

  if (chi_target > 0.0) {
    int steps = 0;
    const Level lv = ramp_adaptive(p, 0.0, chi_target, tr.final_mode, initial_steps, opt, &steps);
    for (std::size_t i = 0; i < lv.chis.size(); ++i) {
      tr.chi_grid.push_back(lv.chis[i]);
      tr.frequencies.push_back(Omega0 * omega_of_pole(lv.poles[i]));
      tr.overlaps.push_back(lv.overlaps[i]);
    }
    tr.final_mode = lv.mode;
    tr.final_pole = lv.poles.back();
    tr.steps = steps;
  }
  tr.lamb_shift = tr.frequencies.back().real() - omega_A;
  tr.decay = std::abs(tr.frequencies.back().imag());
  tr.ipr = ipr(tr.final_mode);
  return tr;
}

std::vector<ChiRow> sweep_chi(const CircuitParams& p, const std::vector<double>& chi_grid, int initial_steps,
                              const TrackOptions& opt) {
  validate(p);
  for (std::size_t i = 0; i < chi_grid.size(); ++i) {
    if (!(chi_grid[i] >= 0.0) || (i > 0 && chi_grid[i] < chi_grid[i - 1])) {
      fail(ErrorKind::Domain, "chi grid must be non-negative and ascending");
    }
  }
  const double Omega0 = plasma_frequency(p);
  std::vector<ChiRow> rows;
  double chi_prev = 0.0;
  cplx omega(p.omega_A, 0.0);
  Eigen::VectorXcd seed = atom_delta(p, opt.closed);
  for (double chi : chi_grid) {
    if (chi > chi_prev) {
      int steps = 0;
      const Level lv = ramp_adaptive(p, chi_prev, chi, seed, initial_steps, opt, &steps);
      seed = lv.mode;
      omega = Omega0 * omega_of_pole(lv.poles.back());
      chi_prev = chi;
    }
    rows.push_back({chi, omega});
  }
  return rows;
}

std::vector<BareFrequencyRow> sweep_bare_frequency(const CircuitParams& p, const std::vector<double>& omega_grid,
                                                   int initial_steps, int workers, const TrackOptions& opt) {
  validate(p);
  const double wc = band_edge(p);
  for (double w : omega_grid) {
    if (!(w > 0.0 && w < 2.0 * wc)) fail(ErrorKind::Domain, "bare frequency grid must lie in (0, 2 omega_c)");
  }
  const double Omega0 = plasma_frequency(p);
  std::vector<BareFrequencyRow> rows(omega_grid.size());
  parallel_for(static_cast<int>(omega_grid.size()), workers, [&](int i) {
    CircuitParams q = p;
    q.omega_A = omega_grid[i];
    const AtomicModeTrace tr = track_atomic_mode(q, q.chi, initial_steps, opt);
    const Snapshot snap = solve_snapshot(q, q.chi, opt.closed);
    BareFrequencyRow row;
    row.omega_A = omega_grid[i];
    std::vector<int> order(snap.poles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return snap.poles[a].imag() < snap.poles[b].imag(); });
    double best = 1e300;
    for (std::size_t j = 0; j < order.size(); ++j) {
      const cplx s = snap.poles[order[j]];
      row.omegas.push_back(Omega0 * omega_of_pole(s));
      const double d = std::abs(s - tr.final_pole);
      if (d < best) {
        best = d;
        row.atomic_id = static_cast<int>(j);
      }
    }
    row.ipr = tr.ipr;
    rows[i] = std::move(row);
  });
  return rows;
}

}  // namespace jjaqed
