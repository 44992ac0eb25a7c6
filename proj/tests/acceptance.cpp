// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run: one line per criterion, PASS or FAIL, with the
// measured numbers and the wall-clock time. Tolerances live here and nowhere
// else.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "jjaqed/circuit.hpp"
#include "jjaqed/constants.hpp"
#include "jjaqed/coupling.hpp"
#include "jjaqed/dynamics.hpp"
#include "jjaqed/noise.hpp"
#include "jjaqed/nonlinear.hpp"
#include "jjaqed/perturbative.hpp"
#include "jjaqed/spectral.hpp"
#include "jjaqed/spectrum.hpp"
#include "jjaqed/tracker.hpp"

using namespace jjaqed;
using std::numbers::pi;

namespace {

// Reference device: array parameters from the defaults, 15 GHz atom charging energy.
CircuitParams device(int N, double chi, double f_A_ghz = 5.0, double T = 0.0) {
  CircuitParams p;
  p.N = N;
  p.chi = chi;
  p.E_C_A = constants::h * 15e9;
  p.omega_A = 2.0 * pi * f_A_ghz * 1e9;
  p.T = T;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

// 1. Infinite-array impedance deep below the band.
Outcome infinite_impedance() {
  const CircuitParams p = device(200, 1.0);
  const double z = std::abs(z_infinity(p, plasma_frequency(p) / 100.0));
  const double ref = std::sqrt(p.L / p.C_g);
  const bool ok = rel(z, ref) < 0.01 && rel(z, 3.16e3) < 0.01;
  return {ok, fmt("|Z_inf| = %.4g ohm, sqrt(L/C_g) = %.4g ohm, rel %.2e", z, ref, rel(z, ref))};
}

// 2. Top of the closed-array spectrum against omega_c.
Outcome band_edge_top() {
  const CircuitParams p = device(1000, 1.0);
  const JJAModeSet jm = solve_closed_jja_modes(build_closed_jja(p));
  const double top = jm.frequencies.maxCoeff();
  const double r = rel(top, band_edge(p));
  return {r < 5e-3, fmt("max omega/2pi = %.5g GHz, omega_c/2pi = %.5g GHz, rel %.2e", top / (2 * pi * 1e9),
                        band_edge(p) / (2 * pi * 1e9), r)};
}

// 3. Decoupled limit of the tracker.
Outcome decoupled_limit() {
  const CircuitParams p = device(100, 1.0);
  const AtomicModeTrace tr = track_atomic_mode(p, 0.0, 8);
  const AtomElements el = derive_atom_elements(p.E_C_A, p.omega_A);
  const double bare = 1.0 / std::sqrt(el.C_A * el.L_A);
  const double r = std::abs(tr.frequencies.back() - bare) / bare;
  const double d_ipr = std::abs(tr.ipr - 1.0);
  return {r < 1e-12 && d_ipr < 1e-12, fmt("rel frequency error %.2e, |IPR - 1| = %.2e", r, d_ipr)};
}

// 4. Closed-array frequencies against the analytic NN and DN dispersion.
Outcome dispersion() {
  const int N = 1000;
  const CircuitParams nn = device(N, 1e-5), dn = device(N, 1.0);
  const JJAModeSet a = solve_closed_jja_modes(build_closed_jja(nn));
  const JJAModeSet b = solve_closed_jja_modes(build_closed_jja(dn));
  double worst_nn = 0.0, worst_dn = 0.0;
  // k = 0 of the NN branch is the zero-frequency mode; relative error is undefined there.
  for (int k = 1; k <= N / 4; ++k) {
    worst_nn = std::max(worst_nn, rel(a.frequencies(k), analytic_dispersion(k, BoundaryCondition::NN, nn)));
  }
  for (int k = 0; k < N / 4; ++k) {
    worst_dn = std::max(worst_dn, rel(b.frequencies(k), analytic_dispersion(k, BoundaryCondition::DN, dn)));
  }
  return {worst_nn < 5e-3 && worst_dn < 5e-3, fmt("worst rel NN %.2e, DN %.2e over the lowest %d modes",
                                                 worst_nn, worst_dn, N / 4)};
}

double pt_lamb_error(double chi) {
  const CircuitParams p = device(200, chi, 15.0);
  const CouplingSet cs = build_coupling_set(p, solve_closed_jja_modes(build_closed_jja(p)));
  const AtomicModeTrace tr = track_atomic_mode(p, chi, 8);
  return std::abs(cs.omega_A_dprime + lamb_shift_pt2(cs) - tr.frequencies.back().real()) / p.omega_A;
}

// 5. Second-order Lamb shift holds at weak coupling and breaks at chi = 1.
Outcome lamb_crossover() {
  const double weak = pt_lamb_error(0.01), strong = pt_lamb_error(1.0);
  return {weak < 0.01 && strong > 0.05, fmt("rel error %.3e at chi=0.01, %.3e at chi=1", weak, strong)};
}

// 6. Golden-rule decay against the tracked decay.
Outcome decay_crossover() {
  auto ratio = [](double chi) {
    const CircuitParams p = device(200, chi, 5.0);
    const AtomicModeTrace tr = track_atomic_mode(p, chi, 8);
    return purcell_pt(p, false) / tr.decay;
  };
  const double weak = ratio(1e-6), strong = ratio(0.1);
  const bool agree = std::abs(weak - 1.0) < 0.25;
  const bool disagree = std::abs(strong - 1.0) > 0.5;
  return {agree && disagree,
          fmt("Gamma_eff/decay = %.4f at chi=1e-6 (needs |r-1| < 0.25: %s), %.4f at chi=0.1 (needs > 0.5: %s)",
              weak, agree ? "yes" : "no", strong, disagree ? "yes" : "no")};
}

// 7. Pole-residue occupation against the covariance ODE.
Outcome modal_vs_oracle() {
  const std::vector<double> grid = linspace(0.0, 500.0, 1001);
  std::string detail;
  bool ok = true;
  for (int N : {1, 20}) {
    const double tol = N == 1 ? 1e-6 : 1e-4;
    double worst = 0.0;
    for (double chi : {1e-3, 1.0}) {
      for (double T : {0.0, 0.05}) {
        const CircuitParams p = device(N, chi, 5.0, T);
        const DynamicsTrace a = atom_occupation_modal(p, grid, T);
        const DynamicsTrace b = covariance_ode_oracle(p, grid, T);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          diff = std::max(diff, std::abs(a.n_A[i] - b.n_A[i]));
          scale = std::max(scale, std::abs(b.n_A[i]));
        }
        worst = std::max(worst, diff / scale);
      }
    }
    ok = ok && worst < tol;
    detail += fmt("%sN=%d sup rel %.2e (tol %.0e)", detail.empty() ? "" : ", ", N, worst, tol);
  }
  return {ok, detail};
}

// 8. Residue sum rules.
Outcome residue_sums() {
  double worst0 = 0.0, worst1 = 0.0;
  for (int N : {1, 20, 100}) {
    const ReducedSystem sys = build_reduced_system(device(N, 1.0));
    const ModeSet ms = solve_quadratic_modes(sys);
    Eigen::MatrixXcd s0 = Eigen::MatrixXcd::Zero(sys.M, sys.M), s1 = s0;
    for (int q = 0; q < ms.size(); ++q) {
      if (ms.defective[q]) continue;
      const Eigen::MatrixXcd R = ms.residue(q);
      s0 += R;
      s1 += ms.poles[q] * R;
    }
    const Eigen::MatrixXd Cinv = sys.C_red.inverse();
    worst0 = std::max(worst0, s0.cwiseAbs().maxCoeff());
    worst1 = std::max(worst1, (s1 - Cinv.cast<cplx>()).cwiseAbs().maxCoeff());
  }
  return {worst0 < 1e-6 && worst1 < 1e-6, fmt("max |sum R| = %.2e, max |sum sR - C^-1| = %.2e", worst0, worst1)};
}

// 9. Every strong FFT peak of the single-junction trace is a pole-pair beat.
Outcome beats() {
  const CircuitParams p = device(1, 1.0, 5.0, 0.05);
  const ModalModel m = build_modal_model(p);
  const DynamicsTrace tr = atom_occupation_modal(m, linspace(0.0, 4000.0, 40001));
  const BeatSpectrum sp = beat_spectrum(tr, m.modes, m.sys.atom_index);
  int matched = 0;
  for (const auto& pk : sp.peaks) matched += pk.matched;
  const bool ok = !sp.peaks.empty() && matched == static_cast<int>(sp.peaks.size());
  return {ok, fmt("%d of %zu peaks above 10x floor matched within 2 bins", matched, sp.peaks.size())};
}

// 10. Steady state rises with coupling and matches the late-time oracle.
Outcome steady_state_trend() {
  std::string detail;
  bool ok = true;
  double prev = -1.0;
  for (double chi : {1e-2, 1e-1, 1.0}) {
    const CircuitParams p = device(100, chi, 5.0, 0.05);
    const ModalModel m = build_modal_model(p);
    const double n = steady_state(m);
    const DynamicsTrace probe = atom_occupation_modal(m, {0.0, 1.0});
    const double t_start = 40.0 / probe.slowest_decay;
    const double avg = oracle_long_time_average(p, p.T, t_start, 0.37, 64);
    const double r = rel(avg, n);
    ok = ok && n > prev && r < 0.01;
    prev = n;
    detail += fmt("%schi=%g n_inf %.4f (oracle rel %.1e)", detail.empty() ? "" : ", ", chi, n, r);
  }
  return {ok, detail};
}

// 11. The trigamma correlation integrates to the white-noise strength.
Outcome noise_limit() {
  const double T = 0.05, Z = 50.0;
  const double tau = constants::hbar / (constants::k_B * T);
  boost::math::quadrature::exp_sinh<double> integrator;
  const double total = 2.0 * integrator.integrate([&](double y) { return noise_correlation(y * tau, T, Z) * tau; });
  const double white = constants::k_B * T / (2.0 * Z);
  const double r = rel(total, white);
  return {r < 0.01, fmt("integral / (k_B T / 2 Z_W) - 1 = %.2e", total / white - 1.0)};
}

// 12. The first-order correction leaves a residual quadratic in Lambda.
Outcome nonlinear_order() {
  std::string detail;
  bool ok = true;
  const double phi0 = 2e-16;
  for (int N : {1, 20}) {
    const CircuitParams p = device(N, 1.0, 15.0);
    const int M = N + 2;
    std::vector<double> t;
    for (int i = 0; i <= 2000; ++i) t.push_back(0.005 * i);
    NonlinearConfig nl;
    nl.initial = Eigen::VectorXd::Zero(2 * M);
    nl.initial(0) = phi0;
    const Trajectory lin = linear_modal_trajectory(p, nl.initial, t);
    const double base = 2e-3 * constants::hbar * p.omega_A / (phi0 * phi0 * phi0);
    std::vector<double> res;
    for (double f : {1.0, 0.5, 0.25}) {
      nl.Lambda = base * f;
      const Trajectory d = integrate_nonlinear_classical(p, nl, t);
      const Trajectory c = first_order_correction(p, nl, lin);
      res.push_back((d.phi - lin.phi - c.phi).cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 1; i < res.size(); ++i) {
      const double ratio = res[i - 1] / res[i];
      ok = ok && std::abs(ratio - 4.0) <= 0.5;
      detail += fmt("%sN=%d ratio %.3f", detail.empty() ? "" : ", ", N, ratio);
    }
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "infinite-array impedance", 1.0, infinite_impedance},
      {2, "band edge", 30.0, band_edge_top},
      {3, "decoupled limit", 1.0, decoupled_limit},
      {4, "dispersion cross-check", 60.0, dispersion},
      {5, "Lamb-shift crossover", 300.0, lamb_crossover},
      {6, "decay crossover", 300.0, decay_crossover},
      {7, "modal-oracle equivalence", 120.0, modal_vs_oracle},
      {8, "residue identities", 30.0, residue_sums},
      {9, "beat spectrum", 30.0, beats},
      {10, "steady-state monotonicity", 300.0, steady_state_trend},
      {11, "noise-correlation limit", 1.0, noise_limit},
      {12, "nonlinear perturbation order", 120.0, nonlinear_order},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %-30s %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.time_limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
