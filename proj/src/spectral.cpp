// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "jjaqed/errors.hpp"

extern "C" {
void dggev_(const char* jobvl, const char* jobvr, const int* n, double* a, const int* lda, double* b,
            const int* ldb, double* alphar, double* alphai, double* beta, double* vl, const int* ldvl,
            double* vr, const int* ldvr, double* work, const int* lwork, int* info);
}

namespace jjaqed {

namespace {

constexpr double kMergeTol = 1e-9;
constexpr double kDefectiveTol = 1e-12;

struct PencilResult {
  std::vector<cplx> eigenvalues;
  Eigen::MatrixXcd vectors;  // top block of the companion eigenvectors
};

// First companion form A z = s B z with z = [v; s v]:
//   A = [[0, I], [-K, -D]],  B = [[I, 0], [0, C]].
PencilResult solve_pencil(const ReducedSystem& sys) {
  const int M = sys.M;
  const int n = 2 * M;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  A.topRightCorner(M, M).setIdentity();
  A.bottomLeftCorner(M, M) = -sys.L_red_inv;
  A.bottomRightCorner(M, M) = -sys.damping_matrix();
  B.topLeftCorner(M, M).setIdentity();
  B.bottomRightCorner(M, M) = sys.C_red;

  Eigen::VectorXd ar(n), ai(n), beta(n);
  Eigen::MatrixXd vr(n, n);
  double vl_dummy = 0.0;
  const int one = 1;
  int info = 0;
  int lwork = -1;
  double wquery = 0.0;
  dggev_("N", "V", &n, A.data(), &n, B.data(), &n, ar.data(), ai.data(), beta.data(), &vl_dummy, &one,
         vr.data(), &n, &wquery, &lwork, &info);
  lwork = static_cast<int>(wquery);
  std::vector<double> work(static_cast<std::size_t>(std::max(lwork, 8 * n)));
  lwork = static_cast<int>(work.size());
  dggev_("N", "V", &n, A.data(), &n, B.data(), &n, ar.data(), ai.data(), beta.data(), &vl_dummy, &one,
         vr.data(), &n, work.data(), &lwork, &info);
  if (info != 0) {
    std::ostringstream os;
    os << "QZ iteration failed (dggev info=" << info << ") on a pencil of order " << n
       << "; C_red diagonal range [" << sys.C_red.diagonal().minCoeff() << ", "
       << sys.C_red.diagonal().maxCoeff() << "]";
    fail(ErrorKind::Solver, os.str());
  }

  PencilResult out;
  out.vectors.resize(M, n);
  for (int j = 0; j < n; ++j) {
    if (beta(j) == 0.0) fail(ErrorKind::Solver, "infinite eigenvalue in a pencil with nonsingular B");
    out.eigenvalues.emplace_back(ar(j) / beta(j), ai(j) / beta(j));
    if (ai(j) == 0.0) {
      out.vectors.col(j) = vr.col(j).head(M).cast<cplx>();
    } else if (ai(j) > 0.0) {
      out.vectors.col(j).real() = vr.col(j).head(M);
      out.vectors.col(j).imag() = vr.col(j + 1).head(M);
      out.vectors.col(j + 1) = out.vectors.col(j).conjugate();
    }
  }
  for (int j = 0; j < n; ++j) {
    const double nv = out.vectors.col(j).norm();
    if (nv > 0.0) out.vectors.col(j) /= nv;
  }
  return out;
}

Eigen::VectorXcd unit(Eigen::VectorXcd x) {
  const double n = x.norm();
  if (n > 0.0 && std::isfinite(n)) x /= n;
  return x;
}

}  // namespace

Eigen::MatrixXcd ModeSet::residue(int p) const {
  return right_vectors.col(p) * left_vectors.col(p).adjoint() / denominators[p];
}

Eigen::MatrixXcd evaluate_Q(const ReducedSystem& sys, cplx s) {
  Eigen::MatrixXcd Q = (s * s) * sys.C_red.cast<cplx>() + sys.L_red_inv.cast<cplx>();
  if (sys.boundary_index) Q(*sys.boundary_index, *sys.boundary_index) += s * sys.damping;
  return Q;
}

Eigen::MatrixXcd evaluate_dQ(const ReducedSystem& sys, cplx s) {
  Eigen::MatrixXcd dQ = (2.0 * s) * sys.C_red.cast<cplx>();
  if (sys.boundary_index) dQ(*sys.boundary_index, *sys.boundary_index) += sys.damping;
  return dQ;
}

SingularTriplet smallest_singular_triplet(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& start) {
  // At a pole sigma_min / sigma_2 is near machine precision, so two sweeps of
  // inverse iteration are already converged; a third costs little. An exactly
  // singular factorization is nudged by a tiny diagonal shift and retried.
  const double scale = std::max(Q.cwiseAbs().maxCoeff(), 1e-300);
  for (double shift : {0.0, 1e-14, 1e-12}) {
    Eigen::MatrixXcd Qs = Q;
    Qs.diagonal().array() += shift * scale;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Qs);
    Eigen::VectorXcd v = unit(start);
    Eigen::VectorXcd u = v;
    for (int it = 0; it < 3; ++it) {
      u = unit(lu.adjoint().solve(v));
      v = unit(lu.solve(u));
    }
    if (v.allFinite() && u.allFinite()) return {(Q * v).norm(), u, v};
  }
  fail(ErrorKind::Solver, "inverse iteration broke down");
}

namespace {

// Nearly dark modes: the pencil only resolves Re s to ~1e-16 absolute,
// while v^H Q(s) v = 0 with real symmetric C, D, K gives the damping as
// -v^H D v / (2 v^H C v) to full relative precision.
cplx polish_dark(const ReducedSystem& sys, cplx s, const Eigen::VectorXcd& v) {
  if (std::abs(s.real()) >= 1e-6 * std::abs(s)) return s;
  const double a = v.dot(sys.C_red.cast<cplx>() * v).real();
  const double b = v.dot(sys.damping_matrix().cast<cplx>() * v).real();
  const double c = v.dot(sys.L_red_inv.cast<cplx>() * v).real();
  if (4.0 * a * c > b * b) s.real(-b / (2.0 * a));
  return s;
}

}  // namespace

cplx omega_of_pole(cplx s) { return {std::abs(s.imag()), s.real()}; }

ModeSet solve_quadratic_modes(const ReducedSystem& sys, const SolveOptions& opt) {
  const int M = sys.M;
  PencilResult pencil = solve_pencil(sys);
  const int n = static_cast<int>(pencil.eigenvalues.size());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const cplx sa = pencil.eigenvalues[a], sb = pencil.eigenvalues[b];
    if (sa.imag() != sb.imag()) return sa.imag() < sb.imag();
    return sa.real() < sb.real();
  });

  ModeSet ms;
  std::vector<int> kept;
  std::vector<bool> flag;
  for (int idx : order) {
    const cplx s = pencil.eigenvalues[idx];
    bool dup = false;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (std::abs(pencil.eigenvalues[kept[k]] - s) < kMergeTol) {
        dup = true;
        flag[k] = true;
        break;
      }
    }
    if (dup) {
      ++ms.merged;
      continue;
    }
    kept.push_back(idx);
    flag.push_back(false);
  }

  const int P = static_cast<int>(kept.size());
  ms.poles.resize(P);
  ms.right_vectors.resize(M, P);
  ms.residual_norms.resize(P);
  ms.defective = flag;
  for (int p = 0; p < P; ++p) {
    ms.poles[p] = pencil.eigenvalues[kept[p]];
    ms.right_vectors.col(p) = pencil.vectors.col(kept[p]);
  }

  if (!opt.residues) {
    for (int p = 0; p < P; ++p) {
      ms.poles[p] = polish_dark(sys, ms.poles[p], ms.right_vectors.col(p));
      ms.residual_norms[p] = (evaluate_Q(sys, ms.poles[p]) * ms.right_vectors.col(p)).norm();
    }
    return ms;
  }

  ms.has_residues = true;
  ms.left_vectors.resize(M, P);
  ms.denominators.resize(P);

  // Conjugate poles share conjugated triplets, so only poles with Im s >= 0 are
  // refined and the partners in the lower half plane copy them.
  std::vector<int> partner(P, -1);
  for (int p = 0; p < P; ++p) {
    if (ms.poles[p].imag() >= 0.0) continue;
    double best = 1e300;
    for (int q = 0; q < P; ++q) {
      if (ms.poles[q].imag() < 0.0) continue;
      const double d = std::abs(ms.poles[q] - std::conj(ms.poles[p]));
      if (d < best) {
        best = d;
        partner[p] = q;
      }
    }
    if (best > 1e-8 * std::max(1.0, std::abs(ms.poles[p]))) partner[p] = -1;
  }

  auto refine = [&](int p) {
    cplx s = ms.poles[p];
    Eigen::VectorXcd start = ms.right_vectors.col(p);
    SingularTriplet t{};
    for (int it = 0;; ++it) {
      t = smallest_singular_triplet(evaluate_Q(sys, s), start);
      if (it >= opt.newton_steps) break;
      const cplx num = t.u.dot(evaluate_Q(sys, s) * t.v);
      const cplx den = t.u.dot(evaluate_dQ(sys, s) * t.v);
      const cplx step = num / den;
      if (!(std::abs(step) < 1e-6 * std::max(1.0, std::abs(s)))) break;
      s -= step;
      start = t.v;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(s))) {
        t = smallest_singular_triplet(evaluate_Q(sys, s), start);
        break;
      }
    }
    if (s.imag() > 0.0) s = polish_dark(sys, s, t.v);
    ms.poles[p] = s;
    ms.right_vectors.col(p) = t.v;
    ms.left_vectors.col(p) = t.u;
    ms.denominators[p] = t.u.dot(evaluate_dQ(sys, s) * t.v);
    ms.residual_norms[p] = (evaluate_Q(sys, s) * t.v).norm();
  };

  for (int p = 0; p < P; ++p) {
    if (partner[p] < 0) refine(p);
  }
  for (int p = 0; p < P; ++p) {
    const int q = partner[p];
    if (q < 0) continue;
    ms.poles[p] = std::conj(ms.poles[q]);
    ms.right_vectors.col(p) = ms.right_vectors.col(q).conjugate();
    ms.left_vectors.col(p) = ms.left_vectors.col(q).conjugate();
    ms.denominators[p] = std::conj(ms.denominators[q]);
    ms.residual_norms[p] = ms.residual_norms[q];
  }
  for (int p = 0; p < P; ++p) {
    if (std::abs(ms.denominators[p]) < kDefectiveTol) ms.defective[p] = true;
  }
  return ms;
}

JJAModeSet solve_closed_jja_modes(const ClosedJJA& jja) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(jja.L_inv, jja.C);
  if (ges.info() != Eigen::Success) fail(ErrorKind::Solver, "closed array eigenproblem failed (C not positive definite?)");
  const int N = static_cast<int>(jja.C.rows());
  JJAModeSet out;
  out.frequencies.resize(N);
  out.modes.resize(N, N);
  for (int k = 0; k < N; ++k) {
    out.frequencies(k) = jja.Omega0 * std::sqrt(std::max(0.0, ges.eigenvalues()(k)));
    Eigen::VectorXd phi = ges.eigenvectors().col(k);
    phi *= std::sqrt(jja.c_norm / phi.dot(jja.C * phi));
    if (phi(0) < 0.0) phi = -phi;
    out.modes.col(k) = phi;
  }
  return out;
}

namespace {

double theta_of(int k, BoundaryCondition bc, int N) {
  const double shift = bc == BoundaryCondition::DN ? 0.5 : 0.0;
  return std::numbers::pi * (k + shift) / N;
}

void check_k(int k, int N) {
  if (k < 0 || k > N) fail(ErrorKind::Domain, "mode number outside [0, N]: " + std::to_string(k));
}

}  // namespace

double analytic_dispersion(int k, BoundaryCondition bc, const CircuitParams& p) {
  check_k(k, p.N);
  const double x = 1.0 - std::cos(theta_of(k, bc, p.N));
  return plasma_frequency(p) * std::sqrt(x / (p.C_g / (2.0 * p.C) + x));
}

double analytic_mode(int k, int n, BoundaryCondition bc, const CircuitParams& p) {
  check_k(k, p.N);
  if (n < 1 || n > p.N) fail(ErrorKind::Domain, "node outside [1, N]: " + std::to_string(n));
  const double th = theta_of(k, bc, p.N);
  const double amp = std::sqrt((p.C_g + 2.0 * p.C) / (p.N * (p.C * (1.0 - std::cos(th)) + p.C_g / 2.0)));
  // Dirichlet at the atom end is a sine, Neumann a cosine.
  return bc == BoundaryCondition::DN ? amp * std::sin(th * n) : amp * std::cos(th * n);
}

}  // namespace jjaqed
