// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "jjaqed/constants.hpp"
#include "jjaqed/dynamics.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

namespace {

// Linear drift of x = (Phi, Z0 Q) / sqrt(hbar Z0) in dimensionless time and
// the white-noise intensity entering the boundary charge row.
struct Drift {
  Eigen::MatrixXd A;
  int M = 0;
  int atom = 0;
  int noise_row = 0;
  double noise = 0.0;
  double r = 1.0;  // Z_A / Z0
};

Drift build_drift(const CircuitParams& p, double T) {
  const ReducedSystem sys = build_reduced_system(p);
  const int M = sys.M;
  Eigen::LLT<Eigen::MatrixXd> llt(sys.C_red);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Solver, "C_red is not positive definite");
  const Eigen::MatrixXd Cinv = llt.solve(Eigen::MatrixXd::Identity(M, M));
  Drift d;
  d.M = M;
  d.atom = sys.atom_index;
  d.noise_row = M + *sys.boundary_index;
  d.A = Eigen::MatrixXd::Zero(2 * M, 2 * M);
  d.A.topRightCorner(M, M) = Cinv;
  d.A.bottomLeftCorner(M, M) = -sys.L_red_inv;
  d.A.bottomRightCorner(M, M) = -sys.damping_matrix() * Cinv;
  d.noise = 2.0 * sys.Z0 * constants::k_B * T / (constants::hbar * sys.Omega0 * p.Z_W);
  d.r = atomic_impedance(p) / sys.Z0;
  return d;
}

// P(t + h) = E P(t) E^T + W over one step.
struct StepMap {
  Eigen::MatrixXd E;
  Eigen::MatrixXd W;
};

StepMap van_loan_block(const Drift& d, double h) {
  const int n = static_cast<int>(d.A.rows());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  F.topLeftCorner(n, n) = -d.A * h;
  F(d.noise_row, n + d.noise_row) = d.noise * h;
  F.bottomRightCorner(n, n) = d.A.transpose() * h;
  const Eigen::MatrixXd G = F.exp();
  StepMap s;
  s.E = G.bottomRightCorner(n, n).transpose();
  s.W = s.E * G.topRightCorner(n, n);
  s.W = 0.5 * (s.W + s.W.transpose());
  if (!s.E.allFinite() || !s.W.allFinite()) {
    fail(ErrorKind::Integrator, "propagator overflow; reduce the time step below " + std::to_string(h));
  }
  return s;
}

StepMap compose(const StepMap& a, const StepMap& b) {  // a then b
  return {b.E * a.E, b.E * a.W * b.E.transpose() + b.W};
}

// The block exponential contains e^{-A h}, which grows like e^{|Re s| h} for
// the strongly damped boundary pole and wrecks W by cancellation. Build the
// map on a step short enough that ||A|| h <= 1/2 and double up to h.
StepMap van_loan(const Drift& d, double h) {
  const double norm = d.A.cwiseAbs().rowwise().sum().maxCoeff();
  int k = 0;
  while (norm * h / std::ldexp(1.0, k) > 0.5) ++k;
  StepMap s = van_loan_block(d, std::ldexp(h, -k));
  for (int i = 0; i < k; ++i) s = compose(s, s);
  return s;
}

struct Moments {
  Eigen::MatrixXd flux, charge, thermal;
};

Moments initial_moments(const Drift& d) {
  const int n = 2 * d.M;
  Moments m{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  m.flux(d.atom, d.atom) = d.r;
  m.charge(d.M + d.atom, d.M + d.atom) = 1.0 / d.r;
  return m;
}

void advance(Moments& m, const StepMap& s) {
  m.flux = s.E * m.flux * s.E.transpose();
  m.charge = s.E * m.charge * s.E.transpose();
  m.thermal = s.E * m.thermal * s.E.transpose() + s.W;
}

double occupation(const Drift& d, const Eigen::MatrixXd& P) {
  return 0.5 * (P(d.atom, d.atom) / d.r + d.r * P(d.M + d.atom, d.M + d.atom));
}

}  // namespace

DynamicsTrace covariance_ode_oracle(const CircuitParams& p, const std::vector<double>& t_grid, double T) {
  if (!(T >= 0.0)) fail(ErrorKind::Domain, "temperature must be non-negative");
  CircuitParams q = p;
  q.T = T;
  validate(q);
  const Drift d = build_drift(q, T);
  Moments m = initial_moments(d);

  DynamicsTrace tr;
  tr.method = DynamicsMethod::Oracle;
  tr.n_A_inf = std::numeric_limits<double>::quiet_NaN();
  tr.hbar_omega0_over_kT = T > 0.0 ? constants::hbar * plasma_frequency(q) / (constants::k_B * T)
                                   : std::numeric_limits<double>::infinity();
  double t_now = 0.0;
  double h_cached = -1.0;
  StepMap cached;
  for (double t : t_grid) {
    const double h = t - t_now;
    if (h < 0.0) fail(ErrorKind::Domain, "time grid must be ascending and start at t >= 0");
    if (h > 0.0) {
      if (std::abs(h - h_cached) > 1e-12 * h) {
        cached = van_loan(d, h);
        h_cached = h;
      }
      advance(m, cached);
      t_now = t;
    }
    const double a = occupation(d, m.flux), b = occupation(d, m.charge), c = occupation(d, m.thermal);
    tr.t.push_back(t);
    tr.part_initial.push_back(a);
    tr.part_vacuum.push_back(b);
    tr.part_thermal.push_back(c);
    tr.n_A.push_back(a + b + c);
  }
  return tr;
}

double oracle_long_time_average(const CircuitParams& p, double T, double t_start, double dt, int samples) {
  if (!(t_start > 0.0) || !(dt > 0.0) || samples < 1) fail(ErrorKind::Domain, "bad long-time window");
  CircuitParams q = p;
  q.T = T;
  validate(q);
  const Drift d = build_drift(q, T);
  int doublings = 0;
  double h0 = t_start;
  while (h0 > 1.0) {
    h0 /= 2.0;
    ++doublings;
  }
  StepMap far = van_loan(d, h0);
  for (int i = 0; i < doublings; ++i) far = compose(far, far);
  Moments m = initial_moments(d);
  advance(m, far);
  const StepMap step = van_loan(d, dt);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    if (i > 0) advance(m, step);
    acc += occupation(d, m.flux) + occupation(d, m.charge) + occupation(d, m.thermal);
  }
  return acc / samples;
}

}  // namespace jjaqed
