// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/circuit.hpp"

#include <cmath>
#include <sstream>

#include "jjaqed/constants.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Solver: return "solver error";
    case ErrorKind::Tracking: return "tracking ambiguity";
    case ErrorKind::Renormalization: return "renormalization breakdown";
    case ErrorKind::Instability: return "instability error";
    case ErrorKind::Resonance: return "resonance error";
    case ErrorKind::Singularity: return "singularity error";
    case ErrorKind::Divergence: return "divergence error";
    case ErrorKind::Integrator: return "integrator error";
    case ErrorKind::Resolution: return "resolution error";
  }
  return "error";
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be positive and finite, got " << v;
    fail(ErrorKind::Domain, os.str());
  }
}

// Adds a two-terminal element of value x between nodes a and b of matrix m.
// A negative index stands for ground.
void stamp(Eigen::MatrixXd& m, int a, int b, double x) {
  if (a >= 0) m(a, a) += x;
  if (b >= 0) m(b, b) += x;
  if (a >= 0 && b >= 0) {
    m(a, b) -= x;
    m(b, a) -= x;
  }
}

constexpr int kGround = -1;

// Assembles atom (optional), chain and waveguide node (optional). `first` is
// the index of array node 1. Values are already dimensionless.
void stamp_chain(Eigen::MatrixXd& Cm, Eigen::MatrixXd& Lm, int first, int N, double cg) {
  for (int n = 0; n < N; ++n) stamp(Cm, first + n, kGround, cg);
  for (int n = 0; n + 1 < N; ++n) {
    stamp(Cm, first + n, first + n + 1, 1.0);
    stamp(Lm, first + n, first + n + 1, 1.0);
  }
}

}  // namespace

void validate(const CircuitParams& p) {
  if (p.N < 1) fail(ErrorKind::Domain, "N must be at least 1, got " + std::to_string(p.N));
  require_positive(p.L, "L");
  require_positive(p.C, "C");
  require_positive(p.C_g, "C_g");
  require_positive(p.C_c, "C_c");
  require_positive(p.E_C_A, "E_C_A");
  require_positive(p.omega_A, "omega_A");
  require_positive(p.Z_W, "Z_W");
  if (!(p.C_W >= 0.0) || !std::isfinite(p.C_W)) fail(ErrorKind::Domain, "C_W must be non-negative");
  if (!(p.chi >= 0.0) || !std::isfinite(p.chi)) fail(ErrorKind::Domain, "chi must be non-negative");
  if (!(p.T >= 0.0) || !std::isfinite(p.T)) fail(ErrorKind::Domain, "T must be non-negative");
}

AtomElements derive_atom_elements(double E_C_A, double omega_A) {
  require_positive(E_C_A, "E_C_A");
  require_positive(omega_A, "omega_A");
  const double C_A = constants::e * constants::e / (2.0 * E_C_A);
  return {C_A, 1.0 / (omega_A * omega_A * C_A)};
}

double plasma_frequency(const CircuitParams& p) { return 1.0 / std::sqrt(p.L * p.C); }
double characteristic_impedance(const CircuitParams& p) { return std::sqrt(p.L / p.C); }
double band_edge(const CircuitParams& p) { return 1.0 / std::sqrt(p.L * (p.C_g / 2.0 + p.C)); }

Eigen::MatrixXd ReducedSystem::damping_matrix() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
  if (boundary_index) D(*boundary_index, *boundary_index) = damping;
  return D;
}

namespace {

ReducedSystem assemble(const CircuitParams& p, bool open) {
  validate(p);
  const auto atom = derive_atom_elements(p.E_C_A, p.omega_A);
  const int N = p.N;
  const int M = open ? N + 2 : N + 1;
  ReducedSystem sys;
  sys.M = M;
  sys.C_red = Eigen::MatrixXd::Zero(M, M);
  sys.L_red_inv = Eigen::MatrixXd::Zero(M, M);
  sys.Z0 = characteristic_impedance(p);
  sys.Omega0 = plasma_frequency(p);
  sys.atom_index = 0;

  // Atom to ground, then the coupler C0 = chi C, 1/L0 = chi/L to node 1.
  stamp(sys.C_red, 0, kGround, atom.C_A / p.C);
  stamp(sys.L_red_inv, 0, kGround, p.L / atom.L_A);
  stamp(sys.C_red, 0, 1, p.chi);
  stamp(sys.L_red_inv, 0, 1, p.chi);
  stamp_chain(sys.C_red, sys.L_red_inv, 1, N, p.C_g / p.C);

  if (open) {
    const int b = N + 1;
    stamp(sys.C_red, N, b, p.C_c / p.C);
    stamp(sys.C_red, b, kGround, p.C_W / p.C);
    sys.boundary_index = b;
    sys.damping = sys.Z0 / p.Z_W;
  }
  return sys;
}

}  // namespace

ReducedSystem build_reduced_system(const CircuitParams& p) { return assemble(p, true); }

ReducedSystem build_closed_system(const CircuitParams& p) { return assemble(p, false); }

ClosedJJA build_closed_jja(const CircuitParams& p) {
  validate(p);
  const int N = p.N;
  ClosedJJA out;
  out.C = Eigen::MatrixXd::Zero(N, N);
  out.L_inv = Eigen::MatrixXd::Zero(N, N);
  stamp_chain(out.C, out.L_inv, 0, N, p.C_g / p.C);
  // The coupler terminates on the (here grounded) atom node.
  out.C(0, 0) += p.chi;
  out.L_inv(0, 0) += p.chi;
  out.Omega0 = plasma_frequency(p);
  out.c_norm = (p.C_g + 2.0 * p.C) / p.C;
  return out;
}

}  // namespace jjaqed
