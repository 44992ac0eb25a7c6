// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Cholesky>

#include "fixtures.hpp"
#include "jjaqed/circuit.hpp"
#include "jjaqed/errors.hpp"

using namespace jjaqed;
using fixtures::device;
using fixtures::rel;

TEST_CASE("atom elements from a 15 GHz charging energy") {
  // e^2 / (2 h 15 GHz) and 1 / (omega^2 C_A), evaluated separately in Python.
  const auto el = derive_atom_elements(constants::h * 15e9, 2 * M_PI * 15e9);
  CHECK(rel(el.C_A, 1.2913486216439416e-15) < 1e-12);
  CHECK(rel(el.L_A, 8.717947349694997e-08) < 1e-12);

  const auto doubled = derive_atom_elements(2 * constants::h * 15e9, 2 * M_PI * 15e9);
  CHECK(rel(doubled.C_A, el.C_A / 2) < 1e-15);

  CHECK_THROWS_AS(derive_atom_elements(0.0, 1.0), Error);
  CHECK_THROWS_AS(derive_atom_elements(1.0, -1.0), Error);
}

TEST_CASE("reference scales") {
  const auto p = device(1000, 1.0);
  CHECK(rel(characteristic_impedance(p), 81.64965809277261) < 1e-13);
  CHECK(rel(plasma_frequency(p) / (2 * M_PI), 12994946687.227936) < 1e-13);
  CHECK(rel(band_edge(p) / (2 * M_PI), 12992781404.085814) < 1e-13);
}

TEST_CASE("parameter validation") {
  auto p = device(10, 1.0);
  p.N = 0;
  CHECK_THROWS_AS(build_reduced_system(p), Error);
  p = device(10, -0.1);
  CHECK_THROWS_AS(build_reduced_system(p), Error);
  p = device(10, 1.0);
  p.C_g = 0.0;
  CHECK_THROWS_AS(build_reduced_system(p), Error);
  p = device(10, 0.0);
  CHECK_NOTHROW(build_reduced_system(p));
}

TEST_CASE("single junction stamps by hand") {
  const double chi = 0.7;
  auto p = device(1, chi, 15.0);
  const auto sys = build_reduced_system(p);
  REQUIRE(sys.M == 3);
  const auto el = derive_atom_elements(p.E_C_A, p.omega_A);
  const double cA = el.C_A / p.C, lA = p.L / el.L_A, cg = p.C_g / p.C, cc = p.C_c / p.C;

  Eigen::Matrix3d C, K;
  C << cA + chi, -chi, 0,
       -chi, chi + cg + cc, -cc,
       0, -cc, cc;
  K << lA + chi, -chi, 0,
       -chi, chi, 0,
       0, 0, 0;
  CHECK((sys.C_red - C).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sys.L_red_inv - K).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sys.C_red(0, 0) == doctest::Approx((el.C_A + chi * p.C) / p.C).epsilon(1e-14));
  CHECK(sys.atom_index == 0);
  CHECK(*sys.boundary_index == 2);
  CHECK(sys.damping == doctest::Approx(sys.Z0 / p.Z_W));
}

TEST_CASE("reduced matrices: symmetry, definiteness, decoupling, boundary") {
  for (double chi : {0.0, 1e-5, 0.3, 1.0, 4.0}) {
    const auto sys = build_reduced_system(device(40, chi));
    const int M = sys.M;
    CHECK(M == 42);
    CHECK((sys.C_red - sys.C_red.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sys.L_red_inv - sys.L_red_inv.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(sys.C_red).info() == Eigen::Success);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.L_red_inv);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(sys.L_red_inv.row(M - 1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.L_red_inv.col(M - 1).cwiseAbs().maxCoeff() == 0.0);
    if (chi == 0.0) {
      CHECK(sys.C_red.row(0).tail(M - 1).cwiseAbs().maxCoeff() == 0.0);
      CHECK(sys.L_red_inv.row(0).tail(M - 1).cwiseAbs().maxCoeff() == 0.0);
    }
    // Interior array rows of the inductive matrix are pure differences.
    for (int n = 2; n < M - 2; ++n) CHECK(std::abs(sys.L_red_inv.row(n).sum()) < 1e-14);
  }
}

TEST_CASE("dimensional round trip") {
  const auto p = device(25, 0.4);
  const auto sys = build_reduced_system(p);
  const auto el = derive_atom_elements(p.E_C_A, p.omega_A);
  const Eigen::MatrixXd C_si = sys.C_red * p.C;
  const Eigen::MatrixXd Linv_si = sys.L_red_inv / p.L;
  CHECK(rel(C_si(0, 0), el.C_A + p.chi * p.C) < 1e-12);
  CHECK(rel(Linv_si(0, 0), 1.0 / el.L_A + p.chi / p.L) < 1e-12);
  CHECK(rel(C_si(5, 5), p.C_g + 2 * p.C) < 1e-12);
  CHECK(rel(-C_si(5, 6), p.C) < 1e-12);
  CHECK(rel(C_si(sys.M - 1, sys.M - 1), p.C_c) < 1e-12);
  CHECK(rel(sys.Z0 * sys.Omega0 * p.C, 1.0) < 1e-12);
  CHECK(rel(sys.Z0 / (sys.Omega0 * p.L), 1.0) < 1e-12);
}

TEST_CASE("closed array diagonals") {
  const double cg = 0.1e-15 / 150e-15;
  auto jja0 = build_closed_jja(device(12, 0.0));
  CHECK(jja0.C(5, 5) == doctest::Approx(cg + 2).epsilon(1e-14));
  CHECK(jja0.L_inv(5, 5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(jja0.C(11, 11) == doctest::Approx(cg + 1).epsilon(1e-14));
  CHECK(jja0.L_inv(11, 11) == doctest::Approx(1.0).epsilon(1e-14));

  auto jja1 = build_closed_jja(device(12, 1.0));
  CHECK(jja1.C(0, 0) == doctest::Approx(cg + 2).epsilon(1e-14));
  CHECK(jja1.L_inv(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(jja1.C(11, 11) == doctest::Approx(cg + 1).epsilon(1e-14));
}

TEST_CASE("closed system drops the waveguide node") {
  const auto open = build_reduced_system(device(8, 1.0));
  const auto closed = build_closed_system(device(8, 1.0));
  CHECK(closed.M == open.M - 1);
  CHECK(!closed.boundary_index);
  CHECK(closed.damping_matrix().cwiseAbs().maxCoeff() == 0.0);
  CHECK((closed.L_red_inv - open.L_red_inv.topLeftCorner(9, 9)).cwiseAbs().maxCoeff() == 0.0);
}
