// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jjaqed/errors.hpp"

namespace jjaqed {

double flux_coupling(double chi, double L, double Z_A, double Z_k, double phi1) {
  return -chi * std::sqrt(Z_A * Z_k) / (2.0 * L) * phi1;
}

double charge_coupling(double chi, double C, double c_jja, double C_A_dprime, double Z_A, double Z_k, double phi1) {
  return -chi * C / (2.0 * c_jja * C_A_dprime * std::sqrt(Z_A * Z_k)) * phi1;
}

CouplingSet build_coupling_set(const CircuitParams& p, const JJAModeSet& modes) {
  validate(p);
  const auto atom = derive_atom_elements(p.E_C_A, p.omega_A);
  const int K = static_cast<int>(modes.frequencies.size());
  if (K != p.N) fail(ErrorKind::Domain, "mode set size does not match N");

  CouplingSet cs;
  cs.chi = p.chi;
  cs.Omega0 = plasma_frequency(p);
  cs.c_jja = p.C_g + 2.0 * p.C;
  const double C0 = p.chi * p.C;
  cs.C_A_prime = atom.C_A + C0;
  cs.L_A_prime = 1.0 / (1.0 / atom.L_A + p.chi / p.L);
  cs.phi1 = modes.modes.row(0).transpose();
  cs.omega_k = modes.frequencies;
  cs.sum_phi1_sq = cs.phi1.squaredNorm();
  cs.C_A_dprime = cs.C_A_prime - C0 * C0 / cs.c_jja * cs.sum_phi1_sq;
  if (!(cs.C_A_dprime > 0.0)) {
    std::ostringstream os;
    os << "renormalized atomic capacitance C_A'' = " << cs.C_A_dprime << " F is not positive (sum_k Phi_k(1)^2 = "
       << cs.sum_phi1_sq << ")";
    fail(ErrorKind::Renormalization, os.str());
  }
  cs.omega_A_prime = 1.0 / std::sqrt(cs.L_A_prime * cs.C_A_prime);
  cs.omega_A_dprime = 1.0 / std::sqrt(cs.L_A_prime * cs.C_A_dprime);
  cs.Z_A = std::sqrt(cs.L_A_prime / cs.C_A_dprime);

  cs.omega_k_prime.resize(K);
  cs.Z_k.resize(K);
  cs.g_phi = Eigen::VectorXd::Zero(K);
  cs.g_q = Eigen::VectorXd::Zero(K);
  cs.xi = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    const double f = C0 * C0 * cs.phi1(k) * cs.phi1(k) / (cs.C_A_dprime * cs.c_jja);
    cs.omega_k_prime(k) = cs.omega_k(k) / std::sqrt(1.0 + f);
    cs.Z_k(k) = cs.omega_k(k) > 0.0 ? 1.0 / (cs.c_jja * cs.omega_k(k)) : std::numeric_limits<double>::infinity();
  }
  if (p.chi > 0.0) {
    for (int k = 0; k < K; ++k) {
      cs.g_phi(k) = flux_coupling(p.chi, p.L, cs.Z_A, cs.Z_k(k), cs.phi1(k));
      cs.g_q(k) = charge_coupling(p.chi, p.C, cs.c_jja, cs.C_A_dprime, cs.Z_A, cs.Z_k(k), cs.phi1(k));
    }
    const double pref = C0 * C0 / (4.0 * cs.c_jja * cs.c_jja * cs.C_A_dprime);
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j <= k; ++j) {
        const double v = pref * cs.phi1(k) * cs.phi1(j) / std::sqrt(cs.Z_k(k) * cs.Z_k(j));
        cs.xi(k, j) = v;
        cs.xi(j, k) = v;
      }
    }
  }
  cs.fsr = free_spectral_range(cs.omega_k_prime);
  cs.regimes = classify_regimes(cs, cs.fsr);
  return cs;
}

Eigen::VectorXd free_spectral_range(const Eigen::VectorXd& w) {
  const Eigen::Index K = w.size();
  Eigen::VectorXd d(K);
  for (Eigen::Index k = 0; k + 1 < K; ++k) d(k) = w(k + 1) - w(k);
  if (K >= 2) d(K - 1) = d(K - 2);
  if (K == 1) d(0) = std::numeric_limits<double>::infinity();
  return d;
}

std::vector<char> classify_regimes(const CouplingSet& cs, const Eigen::VectorXd& fsr) {
  std::vector<char> out(static_cast<std::size_t>(cs.K()), 'C');
  for (int k = 0; k < cs.K(); ++k) {
    const double g = std::max(std::abs(cs.g_phi(k)), std::abs(cs.g_q(k)));
    const double w = std::min(cs.omega_k_prime(k), cs.omega_A_dprime);
    if (g == 0.0) continue;
    if (g >= 0.1 * w) {
      out[k] = 'A';
    } else if (g >= fsr(k)) {
      out[k] = 'B';
    }
  }
  return out;
}

TruncatedSpectrum diagonalize_truncated(const CouplingSet& cs, int k_max) {
  if (k_max < 1 || k_max > cs.K()) fail(ErrorKind::Domain, "k_max outside [1, K]");
  TruncatedSpectrum out;
  if (cs.chi == 0.0) {
    // Nothing couples; the atom is its own normal mode.
    out.frequencies.resize(k_max + 1);
    out.frequencies(0) = cs.omega_A_dprime;
    out.frequencies.tail(k_max) = cs.omega_k.head(k_max);
    std::sort(out.frequencies.data(), out.frequencies.data() + out.frequencies.size());
    out.atomic = cs.omega_A_dprime;
    out.atom_weight = 1.0;
    return out;
  }

  // Quadratic form H = 1/2 q^T KQ q + 1/2 f^T KF f in coordinates scaled by
  // sqrt(Z), so every entry is a frequency. The mode self-terms use omega_k
  // plus the diagonal xi, which is the exact charge-sector renormalization.
  const int n = k_max + 1;
  Eigen::MatrixXd KQ = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd KF = Eigen::MatrixXd::Zero(n, n);
  KQ(0, 0) = cs.omega_A_dprime;
  KF(0, 0) = cs.omega_A_dprime;
  for (int k = 0; k < k_max; ++k) {
    KQ(0, k + 1) = KQ(k + 1, 0) = -2.0 * cs.g_q(k);
    KF(0, k + 1) = KF(k + 1, 0) = 2.0 * cs.g_phi(k);
    KF(k + 1, k + 1) = cs.omega_k(k);
    for (int j = 0; j < k_max; ++j) KQ(k + 1, j + 1) = 4.0 * cs.xi(k, j);
    KQ(k + 1, k + 1) += cs.omega_k(k);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(KQ);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Instability, "charge quadratic form is not positive definite");
  const Eigen::MatrixXd KQinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(KF, 0.5 * (KQinv + KQinv.transpose()));
  if (ges.info() != Eigen::Success) fail(ErrorKind::Instability, "truncated Hamiltonian diagonalization failed");
  const Eigen::VectorXd w2 = ges.eigenvalues();
  if (w2.minCoeff() < -1e-12 * w2.cwiseAbs().maxCoeff()) {
    std::ostringstream os;
    os << "flux quadratic form has a negative direction (omega^2 = " << w2.minCoeff() << ") at k_max=" << k_max;
    fail(ErrorKind::Instability, os.str());
  }
  out.frequencies = w2.cwiseMax(0.0).cwiseSqrt();
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = ges.eigenvectors().col(i);
    const double wgt = x(0) * x(0) / x.squaredNorm();
    if (wgt > best) {
      best = wgt;
      out.atomic = out.frequencies(i);
    }
  }
  out.atom_weight = best;
  return out;
}

}  // namespace jjaqed
