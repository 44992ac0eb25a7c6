// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/perturbative.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "jjaqed/errors.hpp"

namespace jjaqed {

namespace {

void check_frequency(const CircuitParams& p, double omega) {
  if (!(omega > 0.0)) fail(ErrorKind::Domain, "impedance requires omega > 0");
  const double W0 = plasma_frequency(p);
  if (std::abs(omega - W0) < 1e-9 * W0) {
    fail(ErrorKind::Singularity, "omega sits on the junction LC resonance Omega0; Z_LC diverges");
  }
}

cplx z_lc(const CircuitParams& p, double omega) {
  const double W0 = plasma_frequency(p);
  return cplx(0.0, omega * p.L) / (1.0 - (omega * omega) / (W0 * W0));
}

cplx z_ground(const CircuitParams& p, double omega) { return 1.0 / cplx(0.0, omega * p.C_g); }

}  // namespace

cplx z_eff_nodes(const CircuitParams& p, double omega, int n_nodes) {
  check_frequency(p, omega);
  if (n_nodes < 0) fail(ErrorKind::Domain, "negative node count");
  cplx Z = p.Z_W + 1.0 / cplx(0.0, omega * p.C_c);
  if (n_nodes == 0) return Z;
  if (p.chi == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  const cplx zlc = z_lc(p, omega);
  const cplx yg = 1.0 / z_ground(p, omega);
  for (int n = 1; n < n_nodes; ++n) Z = zlc + 1.0 / (yg + 1.0 / Z);
  return zlc / p.chi + 1.0 / (yg + 1.0 / Z);
}

cplx z_eff(const CircuitParams& p, double omega) { return z_eff_nodes(p, omega, p.N); }

cplx z_infinity(const CircuitParams& p, double omega) {
  check_frequency(p, omega);
  const double W0 = plasma_frequency(p);
  // Z_LC Z_g is real: L / (C_g (1 - omega^2/Omega0^2)). The principal root of
  // a negative real is +i sqrt(|x|), the branch wanted above the band.
  const double x = p.L / (p.C_g * (1.0 - (omega * omega) / (W0 * W0)));
  return std::sqrt(cplx(x, 0.0));
}

double purcell_pt(const CircuitParams& p, bool use_infinite) {
  validate(p);
  const auto atom = derive_atom_elements(p.E_C_A, p.omega_A);
  const cplx Z = use_infinite ? z_infinity(p, p.omega_A) : z_eff(p, p.omega_A);
  if (std::isinf(Z.real())) return 0.0;
  return (1.0 / Z).real() / (2.0 * std::numbers::pi * atom.C_A);
}

double lamb_shift_pt2(const CouplingSet& cs) {
  double shift = 0.0;
  for (int k = 0; k < cs.K(); ++k) {
    const double wa = cs.omega_A_dprime, wk = cs.omega_k_prime(k);
    const double gm = cs.g_phi(k) - cs.g_q(k), gp = cs.g_phi(k) + cs.g_q(k);
    if (gm == 0.0 && gp == 0.0) continue;
    if (std::abs(wa - wk) < 1e-6 * cs.Omega0) {
      std::ostringstream os;
      os << "omega_A'' is resonant with array mode k=" << k << " (|omega_A'' - omega'_k| = " << std::abs(wa - wk)
         << " rad/s)";
      fail(ErrorKind::Resonance, os.str());
    }
    shift += gm * gm / (wa - wk) - gp * gp / (wa + wk);
  }
  return shift;
}

ImpedanceProfile impedance_profile(const CircuitParams& p, const std::vector<double>& omega_grid) {
  ImpedanceProfile out;
  for (double w : omega_grid) {
    out.omega.push_back(w);
    out.Z_eff.push_back(z_eff(p, w));
    out.Z_inf.push_back(z_infinity(p, w));
  }
  return out;
}

}  // namespace jjaqed
