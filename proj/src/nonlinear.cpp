// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/nonlinear.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "jjaqed/constants.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

namespace {

void check_initial(const ReducedSystem& sys, const NonlinearConfig& nl) {
  if (nl.initial.size() != 2 * sys.M) {
    fail(ErrorKind::Domain, "initial amplitudes must have length 2M = " + std::to_string(2 * sys.M));
  }
  if (!(nl.lambda_scale > 0.0)) fail(ErrorKind::Domain, "lambda_scale must be positive");
}

double amplitude_scale(const Eigen::VectorXd& x) {
  const double s = x.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

void check_uniform(const std::vector<double>& t) {
  if (t.size() < 2) fail(ErrorKind::Domain, "grid needs at least two points");
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::abs(h)) fail(ErrorKind::Domain, "grid must be uniform");
  }
}

}  // namespace

double nonlinear_strength(const CircuitParams& p, const NonlinearConfig& nl) {
  const double phi = std::abs(nl.initial(0));
  return std::abs(nl.Lambda * nl.lambda_scale) * phi * phi * phi / (constants::hbar * p.omega_A);
}

Trajectory integrate_nonlinear_classical(const CircuitParams& p, const NonlinearConfig& nl,
                                         const std::vector<double>& t_grid) {
  const ReducedSystem sys = build_reduced_system(p);
  check_initial(sys, nl);
  const int M = sys.M;
  const int A = sys.atom_index;
  Eigen::LLT<Eigen::MatrixXd> llt(sys.C_red);
  const Eigen::MatrixXd Cinv = llt.solve(Eigen::MatrixXd::Identity(M, M));
  Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(2 * M, 2 * M);
  drift.topRightCorner(M, M) = Cinv;
  drift.bottomLeftCorner(M, M) = -sys.L_red_inv;
  drift.bottomRightCorner(M, M) = -sys.damping_matrix() * Cinv;

  // Work in units of the largest initial amplitude so the tolerances mean
  // something; the cubic source picks up one power of that scale.
  const double scale = amplitude_scale(nl.initial);
  const double kappa = -(sys.Z0 / sys.Omega0) * 3.0 * nl.Lambda * nl.lambda_scale * scale;
  const double limit = 1e6;

  using State = std::vector<double>;
  auto rhs = [&](const State& y, State& dy, double) {
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), 2 * M);
    Eigen::Map<Eigen::VectorXd> dv(dy.data(), 2 * M);
    if (!(yv.cwiseAbs().maxCoeff() < limit)) {
      fail(ErrorKind::Instability, "nonlinear trajectory exceeded 1e6 times its initial amplitude");
    }
    dv.noalias() = drift * yv;
    dv(M + A) += kappa * yv(A) * yv(A);
  };

  Trajectory tr;
  tr.t = t_grid;
  tr.phi.resize(static_cast<Eigen::Index>(t_grid.size()), M);
  tr.q.resize(static_cast<Eigen::Index>(t_grid.size()), M);
  tr.strength = nonlinear_strength(p, nl);
  State y(nl.initial.data(), nl.initial.data() + 2 * M);
  for (double& v : y) v /= scale;
  std::size_t row = 0;
  auto observe = [&](const State& s, double) {
    for (int i = 0; i < M; ++i) {
      tr.phi(static_cast<Eigen::Index>(row), i) = s[i] * scale;
      tr.q(static_cast<Eigen::Index>(row), i) = s[M + i] * scale;
    }
    ++row;
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(1e-10, 1e-10, ode::runge_kutta_dopri5<State>());
  try {
    ode::integrate_times(stepper, rhs, y, t_grid.begin(), t_grid.end(), 1e-3, observe);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorKind::Integrator, std::string("nonlinear integration failed: ") + e.what());
  }
  return tr;
}

Trajectory propagate_atom_source(const ReducedSystem& sys, const ModeSet& modes, const std::vector<double>& t_grid,
                                 const std::vector<double>& source) {
  check_uniform(t_grid);
  if (source.size() != t_grid.size()) fail(ErrorKind::Domain, "source and grid lengths differ");
  if (!modes.has_residues) fail(ErrorKind::Domain, "propagation needs residues");
  const int M = sys.M;
  const int A = sys.atom_index;
  const int P = modes.size();
  const double h = t_grid[1] - t_grid[0];
  const Eigen::MatrixXcd Cc = sys.C_red.cast<cplx>();

  // Column A of R_p and of s_p C R_p.
  Eigen::MatrixXcd rcol(M, P), qcol(M, P);
  Eigen::VectorXcd decay(P);
  for (int p = 0; p < P; ++p) {
    if (modes.defective[p]) {
      rcol.col(p).setZero();
      qcol.col(p).setZero();
    } else {
      const cplx w = std::conj(modes.left_vectors(A, p)) / modes.denominators[p];
      rcol.col(p) = modes.right_vectors.col(p) * w;
      qcol.col(p) = modes.poles[p] * (Cc * rcol.col(p));
    }
    decay(p) = std::exp(modes.poles[p] * h);
  }

  // Modal amplitudes c_p(t) = int_0^t e^{s_p (t - tau)} f(tau) dtau, advanced
  // with the trapezoidal rule on the grid.
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(P);
  Trajectory tr;
  tr.t = t_grid;
  const auto n = static_cast<Eigen::Index>(t_grid.size());
  tr.phi.resize(n, M);
  tr.q.resize(n, M);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) {
      c = decay.cwiseProduct(c) + (0.5 * h) * (decay * source[i - 1] + Eigen::VectorXcd::Constant(P, source[i]));
    }
    tr.phi.row(i) = (rcol * c).real().transpose();
    tr.q.row(i) = (qcol * c).real().transpose();
  }
  return tr;
}

Trajectory linear_modal_trajectory(const CircuitParams& p, const Eigen::VectorXd& initial,
                                   const std::vector<double>& t_grid) {
  const ReducedSystem sys = build_reduced_system(p);
  const ModeSet modes = solve_quadratic_modes(sys);
  const int M = sys.M;
  if (initial.size() != 2 * M) fail(ErrorKind::Domain, "initial amplitudes must have length 2M");
  const Eigen::VectorXcd phi0 = initial.head(M).cast<cplx>();
  const Eigen::VectorXcd q0 = initial.tail(M).cast<cplx>();
  const Eigen::MatrixXcd Cc = sys.C_red.cast<cplx>();
  const Eigen::MatrixXcd Dc = sys.damping_matrix().cast<cplx>();
  const int P = modes.size();

  // Phi(t) = sum_p e^{s_p t} R_p Y_p with Y_p = (s_p C + D) Phi0 + Z0 Q0.
  Eigen::MatrixXcd amp(M, P), qamp(M, P);
  for (int p = 0; p < P; ++p) {
    if (modes.defective[p]) {
      amp.col(p).setZero();
      qamp.col(p).setZero();
      continue;
    }
    const cplx s = modes.poles[p];
    const Eigen::VectorXcd Y = (s * Cc + Dc) * phi0 + q0;
    const cplx w = modes.left_vectors.col(p).dot(Y) / modes.denominators[p];
    amp.col(p) = modes.right_vectors.col(p) * w;
    qamp.col(p) = s * (Cc * amp.col(p));
  }
  Trajectory tr;
  tr.t = t_grid;
  const auto n = static_cast<Eigen::Index>(t_grid.size());
  tr.phi.resize(n, M);
  tr.q.resize(n, M);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXcd e(P);
    for (int p = 0; p < P; ++p) e(p) = std::exp(modes.poles[p] * t_grid[static_cast<std::size_t>(i)]);
    tr.phi.row(i) = (amp * e).real().transpose();
    tr.q.row(i) = (qamp * e).real().transpose();
  }
  return tr;
}

Trajectory first_order_correction(const CircuitParams& p, const NonlinearConfig& nl, const Trajectory& linear) {
  const ReducedSystem sys = build_reduced_system(p);
  if (linear.phi.cols() != sys.M || linear.phi.rows() != static_cast<Eigen::Index>(linear.t.size())) {
    fail(ErrorKind::Domain, "linear trajectory does not match the circuit");
  }
  check_uniform(linear.t);
  const ModeSet modes = solve_quadratic_modes(sys);
  const double k = -(sys.Z0 / sys.Omega0) * 3.0 * nl.Lambda * nl.lambda_scale;
  std::vector<double> source(linear.t.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double a = linear.phi(static_cast<Eigen::Index>(i), sys.atom_index);
    source[i] = k * a * a;
  }
  Trajectory tr = propagate_atom_source(sys, modes, linear.t, source);
  const double a0 = std::abs(linear.phi(0, sys.atom_index));
  tr.strength = std::abs(nl.Lambda * nl.lambda_scale) * a0 * a0 * a0 / (constants::hbar * p.omega_A);
  return tr;
}

}  // namespace jjaqed
