#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibp/psd_linalg.hpp"
#include "ibp/rng.hpp"
#include "support.hpp"

using namespace ibp;
using test_support::approx_equal;
using test_support::random_matrix;
using test_support::random_psd;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

SymMatrix diag2(double a, double b) { return symmetrize(mat2(a, 0, 0, b)); }

}  // namespace

TEST_CASE("symmetrize averages off-diagonal entries") {
  const SymMatrix s = symmetrize(mat2(1, 2, 0, 1));
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == 1.0);
  CHECK(s(1, 0) == 1.0);
  CHECK(s(1, 1) == 1.0);
}

TEST_CASE("symmetrize is the identity on symmetric input") {
  Rng rng(3);
  const SymMatrix s = random_psd(rng, 3);
  const SymMatrix again = symmetrize(s.mat());
  CHECK(again.mat() == s.mat());
}

TEST_CASE("symmetrize handles 1x1") {
  const SymMatrix s = symmetrize(Eigen::MatrixXd::Constant(1, 1, 5.0));
  CHECK(s(0, 0) == 5.0);
  CHECK(s.dim() == 1);
}

TEST_CASE("symmetrize output is exactly symmetric for random input") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const SymMatrix s = symmetrize(random_matrix(rng, 4, 4));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) CHECK(s(i, j) == s(j, i));
    }
  }
}

TEST_CASE("SymMatrix rejects non-square and empty input") {
  CHECK_THROWS_AS(symmetrize(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(symmetrize(Eigen::MatrixXd()), std::invalid_argument);
}

TEST_CASE("psd_compare basic orderings") {
  const SymMatrix I2 = SymMatrix::Identity(2);
  const SymMatrix twoI = symmetrize(2.0 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(psd_compare(I2, twoI, 1e-9) == PsdOrder::LessEq);
  CHECK(psd_compare(twoI, I2, 1e-9) == PsdOrder::GreaterEq);
  CHECK(psd_compare(diag2(2, 1), diag2(1, 2), 1e-9) == PsdOrder::Incomparable);
  Rng rng(5);
  const SymMatrix m = random_psd(rng, 3);
  CHECK(psd_compare(m, m, 1e-9) == PsdOrder::Equal);
}

TEST_CASE("psd_compare rejects dimension mismatch") {
  CHECK_THROWS_AS(psd_compare(SymMatrix::Identity(2), SymMatrix::Identity(3)),
                  std::invalid_argument);
}

TEST_CASE("psd_compare detects constructed dominance, 1000 random pairs") {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const SymMatrix a = random_psd(rng, 4);
    const Eigen::MatrixXd l = random_matrix(rng, 4, 4);
    const SymMatrix b = symmetrize(a.mat() + l * l.transpose());
    const PsdOrder o = psd_compare(a, b, 1e-9);
    CHECK((o == PsdOrder::LessEq || o == PsdOrder::Equal));
  }
}

TEST_CASE("psd_compare antisymmetry and reflexivity on random pairs") {
  Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    const SymMatrix a = random_psd(rng, 3);
    const SymMatrix b = random_psd(rng, 3);
    const PsdOrder ab = psd_compare(a, b, 1e-9);
    const PsdOrder ba = psd_compare(b, a, 1e-9);
    switch (ab) {
      case PsdOrder::LessEq: CHECK(ba == PsdOrder::GreaterEq); break;
      case PsdOrder::GreaterEq: CHECK(ba == PsdOrder::LessEq); break;
      case PsdOrder::Equal: CHECK(ba == PsdOrder::Equal); break;
      case PsdOrder::Incomparable: CHECK(ba == PsdOrder::Incomparable); break;
    }
    CHECK(psd_compare(a, a, 1e-9) == PsdOrder::Equal);
  }
}

TEST_CASE("is_psd basics") {
  CHECK(is_psd(diag2(1, 0)));
  CHECK_FALSE(is_psd(diag2(1, -1)));
  CHECK(is_psd(SymMatrix::Zero(3)));
}

TEST_CASE("sim_diagonalize solves the hand 2x2 generalized problem") {
  const SymMatrix m1 = diag2(4, 1);
  const SymMatrix m2 = diag2(1, 4);
  const SimDiag sd = sim_diagonalize(m1, m2, 0.0);
  // Eigenvalues ascending: 1/4 and 4.
  CHECK(sd.eigvals(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sd.eigvals(1) == doctest::Approx(4.0).epsilon(1e-12));
  // Columns scaled by vᵀM2v = 1 with positive leading entry.
  CHECK(approx_equal(sd.eigvecs, mat2(0, 1, 0.5, 0), 1e-12));
  // Diagonalization identities.
  const Eigen::MatrixXd vt = sd.eigvecs.transpose();
  CHECK(approx_equal(vt * m2.mat() * sd.eigvecs,
                     Eigen::MatrixXd::Identity(2, 2), 1e-12));
  CHECK(approx_equal(vt * m1.mat() * sd.eigvecs,
                     Eigen::MatrixXd(sd.eigvals.asDiagonal()), 1e-12));
}

TEST_CASE("sim_diagonalize of identical matrices gives unit eigenvalues") {
  const SymMatrix m = SymMatrix::Identity(3);
  const SimDiag sd = sim_diagonalize(m, m, 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(sd.eigvals(i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sim_diagonalize with zero numerator gives zero eigenvalues") {
  const SimDiag sd =
      sim_diagonalize(SymMatrix::Zero(3), SymMatrix::Identity(3), 0.0);
  CHECK(sd.eigvals.maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sim_diagonalize rejects non-PSD input and degenerate M2") {
  CHECK_THROWS_AS(sim_diagonalize(diag2(1, -1), SymMatrix::Identity(2), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sim_diagonalize(SymMatrix::Identity(2), SymMatrix::Zero(2), 0.0),
                  std::runtime_error);
}

TEST_CASE("sim_diagonalize round trip reconstructs both inputs") {
  Rng rng(29);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix m1 = random_psd(rng, 4, 1e-3);
    const SymMatrix m2 = random_psd(rng, 4, 1e-3);
    const SimDiag sd = sim_diagonalize(m1, m2, 0.0);
    // (Vᵀ)⁻¹ = M2·V because VᵀM2V = I.
    const Eigen::MatrixXd t2 = m2.mat() * sd.eigvecs;
    const Eigen::MatrixXd m1r = t2 * sd.eigvals.asDiagonal() * t2.transpose();
    const Eigen::MatrixXd m2r = t2 * t2.transpose();
    CHECK((m1r - m1.mat()).norm() <= 1e-8 * std::max(1.0, m1.mat().norm()));
    CHECK((m2r - m2.mat()).norm() <= 1e-8 * std::max(1.0, m2.mat().norm()));
  }
}

TEST_CASE("sim_diagonalize applies the ridge to both matrices") {
  const SymMatrix m1 = diag2(2, 0);
  const SymMatrix m2 = diag2(0, 3);  // singular: needs the ridge
  const SimDiag sd = sim_diagonalize(m1, m2, 1e-10);
  CHECK(sd.delta == doctest::Approx(1e-10 * 3.0));
  const Eigen::MatrixXd vt = sd.eigvecs.transpose();
  const Eigen::MatrixXd b =
      m2.mat() + sd.delta * Eigen::MatrixXd::Identity(2, 2);
  CHECK(approx_equal(vt * b * sd.eigvecs, Eigen::MatrixXd::Identity(2, 2),
                     1e-9));
}
