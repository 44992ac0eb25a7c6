// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "jjaqed/constants.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

EtaZeta eta_zeta(const ModeSet& modes, const ReducedSystem& sys, int j) {
  if (!modes.has_residues) fail(ErrorKind::Domain, "eta/zeta need a mode set with residues");
  if (j < 0 || j >= sys.M) fail(ErrorKind::Domain, "observation node out of range");
  const int P = modes.size();
  EtaZeta ez;
  ez.eta = Eigen::MatrixXcd::Zero(P, sys.M);
  ez.zeta = Eigen::MatrixXcd::Zero(P, sys.M);
  const Eigen::MatrixXcd Cc = sys.C_red.cast<cplx>();
  for (int p = 0; p < P; ++p) {
    if (modes.defective[p]) {
      ++ez.excluded;
      continue;
    }
    // R_p = v u^H / d, so row j of R_p is v_j u^H / d and row j of C R_p is
    // (C v)_j u^H / d.
    const Eigen::RowVectorXcd uh = modes.left_vectors.col(p).adjoint() / modes.denominators[p];
    const cplx vj = modes.right_vectors(j, p);
    const cplx cvj = (Cc.row(j) * modes.right_vectors.col(p)).value();
    ez.eta.row(p) = vj * uh;
    ez.zeta.row(p) = modes.poles[p] * cvj * uh;
  }
  return ez;
}

double atomic_impedance(const CircuitParams& p) {
  validate(p);
  const auto atom = derive_atom_elements(p.E_C_A, p.omega_A);
  const ClosedJJA jja = build_closed_jja(p);
  Eigen::LLT<Eigen::MatrixXd> llt(jja.C);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Solver, "closed array capacitance is not positive definite");
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(p.N);
  e1(0) = 1.0;
  const double inv11 = llt.solve(e1)(0) / p.C;
  const double C0 = p.chi * p.C;
  const double C_A_dprime = atom.C_A + C0 - C0 * C0 * inv11;
  if (!(C_A_dprime > 0.0)) fail(ErrorKind::Renormalization, "renormalized atomic capacitance is not positive");
  const double L_A_prime = 1.0 / (1.0 / atom.L_A + p.chi / p.L);
  return std::sqrt(L_A_prime / C_A_dprime);
}

ModalModel build_modal_model(const CircuitParams& p) {
  validate(p);
  ModalModel m;
  m.sys = build_reduced_system(p);
  m.modes = solve_quadratic_modes(m.sys);
  m.atom = eta_zeta(m.modes, m.sys, m.sys.atom_index);
  m.Z_A = atomic_impedance(p);
  m.T = p.T;
  m.thermal_prefactor = constants::k_B * p.T * m.sys.Z0 * m.sys.Z0 /
                        (constants::hbar * m.sys.Omega0 * m.Z_A * p.Z_W);
  return m;
}

namespace {

// (e^{x t} - 1) / x given e^{x t}; a short series where the quotient cancels.
cplx growth(cplx x, cplx ext, double t) {
  const cplx xt = x * t;
  if (std::abs(x) < 1e-10 || std::abs(xt) < 1e-3) {
    return t * (1.0 + xt / 2.0 + xt * xt / 6.0 + xt * xt * xt / 24.0);
  }
  return (ext - 1.0) / x;
}

struct PairTable {
  Eigen::MatrixXcd W;  // eta_pb eta_mb + (Z_A/Z0)^2 zeta_pb zeta_mb
  Eigen::MatrixXcd x;  // s_p + s_m
};

PairTable thermal_pairs(const ModalModel& m) {
  const int P = m.modes.size();
  const int b = *m.sys.boundary_index;
  const double r2 = (m.Z_A / m.sys.Z0) * (m.Z_A / m.sys.Z0);
  PairTable t;
  t.W.resize(P, P);
  t.x.resize(P, P);
  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < P; ++q) {
      t.W(p, q) = m.atom.eta(p, b) * m.atom.eta(q, b) + r2 * m.atom.zeta(p, b) * m.atom.zeta(q, b);
      t.x(p, q) = m.modes.poles[p] + m.modes.poles[q];
    }
  }
  return t;
}

}  // namespace

DynamicsTrace atom_occupation_modal(const ModalModel& m, const std::vector<double>& t_grid) {
  const int P = m.modes.size();
  const int A = m.sys.atom_index;
  const double r = m.Z_A / m.sys.Z0;
  const Eigen::VectorXcd Ccol = m.sys.C_red.col(A).cast<cplx>();

  Eigen::VectorXcd s(P), a(P), bq(P), eA(P), zA(P);
  for (int p = 0; p < P; ++p) {
    s(p) = m.modes.poles[p];
    a(p) = (m.atom.eta.row(p) * Ccol).value();
    bq(p) = (m.atom.zeta.row(p) * Ccol).value();
    eA(p) = m.atom.eta(p, A);
    zA(p) = m.atom.zeta(p, A);
  }

  const PairTable pairs = thermal_pairs(m);
  const bool thermal = m.thermal_prefactor > 0.0;

  DynamicsTrace tr;
  tr.method = DynamicsMethod::Modal;
  for (double t : t_grid) {
    Eigen::VectorXcd E(P);
    for (int p = 0; p < P; ++p) E(p) = std::exp(s(p) * t);
    const cplx S1 = (E.array() * s.array() * a.array()).sum();
    const cplx S2 = (E.array() * s.array() * bq.array()).sum();
    const cplx S3 = (E.array() * eA.array()).sum();
    const cplx S4 = (E.array() * zA.array()).sum();
    const cplx line1 = 0.5 * (S1 * S1 + r * r * S2 * S2);
    const cplx line2 = 0.5 * (S3 * S3 / (r * r) + S4 * S4);
    cplx th = 0.0;
    if (thermal) {
      for (int p = 0; p < P; ++p) {
        th += pairs.W(p, p) * growth(pairs.x(p, p), E(p) * E(p), t);
        for (int q = p + 1; q < P; ++q) th += 2.0 * pairs.W(p, q) * growth(pairs.x(p, q), E(p) * E(q), t);
      }
      th *= m.thermal_prefactor;
    }
    const cplx total = line1 + line2 + th;
    tr.t.push_back(t);
    tr.part_initial.push_back(line1.real());
    tr.part_vacuum.push_back(line2.real());
    tr.part_thermal.push_back(th.real());
    tr.n_A.push_back(total.real());
    tr.max_imag = std::max(tr.max_imag, std::abs(total.imag()));
  }

  // Slowest damping among poles the atom can see, and the damping of the pole
  // the atom mostly lives in. The delta-noise approximation needs the thermal
  // correlation time hbar/k_BT to be short against the latter.
  const double eta_max = m.atom.eta.cwiseAbs().maxCoeff();
  double slowest = std::numeric_limits<double>::infinity();
  double loudest = 0.0;
  for (int p = 0; p < P; ++p) {
    const double w = m.atom.eta.row(p).cwiseAbs().maxCoeff();
    if (w > 1e-10 * eta_max && s(p).real() < -1e-14) slowest = std::min(slowest, -s(p).real());
    if (std::abs(s(p)) > 1e-9 && std::abs(eA(p)) > loudest) {
      loudest = std::abs(eA(p));
      tr.atom_decay = -s(p).real();
    }
  }
  tr.slowest_decay = slowest;
  if (m.T > 0.0) {
    const double kT = constants::k_B * m.T;
    tr.hbar_omega0_over_kT = constants::hbar * m.sys.Omega0 / kT;
    const double ratio = tr.atom_decay * m.sys.Omega0 * constants::hbar / kT;
    if (!(ratio < 0.1)) {
      std::ostringstream os;
      os << "delta-correlated noise approximation questionable: atomic decay times hbar/k_BT = " << ratio;
      tr.warnings.push_back(os.str());
    }
  } else {
    tr.hbar_omega0_over_kT = std::numeric_limits<double>::infinity();
  }
  if (m.atom.excluded > 0) {
    tr.warnings.push_back(std::to_string(m.atom.excluded) + " defective pole(s) excluded from the expansion");
  }
  try {
    tr.n_A_inf = steady_state(m);
  } catch (const Error& e) {
    tr.n_A_inf = std::numeric_limits<double>::quiet_NaN();
    tr.warnings.push_back(e.what());
  }
  return tr;
}

DynamicsTrace atom_occupation_modal(const CircuitParams& p, const std::vector<double>& t_grid, double T) {
  if (!(T >= 0.0)) fail(ErrorKind::Domain, "temperature must be non-negative");
  CircuitParams q = p;
  q.T = T;
  return atom_occupation_modal(build_modal_model(q), t_grid);
}

double steady_state(const ModalModel& m) {
  if (!(m.thermal_prefactor > 0.0)) return 0.0;
  const PairTable pairs = thermal_pairs(m);
  const int P = m.modes.size();
  const double wmax = pairs.W.cwiseAbs().maxCoeff();

  // Weakly radiating modes near the band edge have Re s ~ 1e-14 yet carry a
  // finite share of the thermal occupation, so every damped pair is kept no
  // matter how small W is. Only poles that do not decay at all (or sit at the
  // origin, where Re s is pure round-off) are dropped, and only if the atom
  // cannot see them.
  std::vector<bool> undamped(P);
  for (int p = 0; p < P; ++p) {
    const cplx s = m.modes.poles[p];
    undamped[p] = !(s.real() < 0.0) || std::abs(s) < 1e-9;
  }
  cplx sum = 0.0;
  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < P; ++q) {
      const cplx x = pairs.x(p, q);
      if (undamped[p] || undamped[q]) {
        if (std::abs(pairs.W(p, q)) <= 1e-10 * wmax) continue;
        std::ostringstream os;
        os << "undamped pole pair (" << p << ", " << q << "), Re(s_p + s_m) = " << x.real()
           << ", with visible atom-row residues; no steady state";
        fail(ErrorKind::Divergence, os.str());
      }
      sum -= pairs.W(p, q) / x;
    }
  }
  return m.thermal_prefactor * sum.real();
}

double steady_state(const CircuitParams& p, double T) {
  CircuitParams q = p;
  q.T = T;
  return steady_state(build_modal_model(q));
}

}  // namespace jjaqed
