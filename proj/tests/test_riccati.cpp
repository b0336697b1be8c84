#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibp/riccati.hpp"
#include "support.hpp"

using namespace ibp;
using test_support::approx_equal;
using test_support::random_matrix;
using test_support::random_psd;
using test_support::scalar_scenario;

namespace {

SymMatrix scal(double v) {
  return symmetrize(Eigen::MatrixXd::Constant(1, 1, v));
}

const Eigen::MatrixXd kA1 = Eigen::MatrixXd::Constant(1, 1, 1.0);

}  // namespace

TEST_CASE("riccati_step scalar hand values") {
  // (1/1 + 1)⁻¹ = 0.5
  CHECK(riccati_step(scal(1), scal(1), kA1, scal(0))(0, 0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // (1/1 + 2)⁻¹ + 1 = 4/3
  CHECK(riccati_step(scal(1), scal(2), kA1, scal(1))(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("riccati_step with zero information is pure prediction") {
  Rng rng(1);
  const SymMatrix C = random_psd(rng, 3, 1e-2);
  const Eigen::MatrixXd A = random_matrix(rng, 3, 3);
  const SymMatrix Q = random_psd(rng, 3);
  const SymMatrix out = riccati_step(C, SymMatrix::Zero(3), A, Q);
  CHECK(approx_equal(out.mat(), A * C.mat() * A.transpose() + Q.mat(), 1e-14));
}

TEST_CASE("riccati_step rejects singular C") {
  CHECK_THROWS_AS(
      riccati_step(SymMatrix::Zero(2), SymMatrix::Identity(2),
                   Eigen::MatrixXd::Identity(2, 2), SymMatrix::Identity(2)),
      std::runtime_error);
}

TEST_CASE("riccati_step rejects dimension mismatch") {
  CHECK_THROWS_AS(
      riccati_step(SymMatrix::Identity(2), SymMatrix::Identity(3),
                   Eigen::MatrixXd::Identity(2, 2), SymMatrix::Identity(2)),
      std::invalid_argument);
}

TEST_CASE("gain form agrees with the information form on PD input") {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    const SymMatrix C = random_psd(rng, 4, 1e-2);
    const SymMatrix M = random_psd(rng, 4);
    const Eigen::MatrixXd A = random_matrix(rng, 4, 4);
    const SymMatrix Q = random_psd(rng, 4);
    const SymMatrix info = riccati_step(C, M, A, Q);
    const SymMatrix gain = riccati_step_gain(C, M, A, Q);
    CHECK(approx_equal(info.mat(), gain.mat(), 1e-10));
  }
}

TEST_CASE("gain form handles singular C") {
  // C = diag(1,0), M = I, A = I, Q = I: P = diag(1/2, 0), result diag(3/2, 1).
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  c(0, 0) = 1.0;
  const SymMatrix out =
      riccati_step_gain(symmetrize(c), SymMatrix::Identity(2),
                        Eigen::MatrixXd::Identity(2, 2), SymMatrix::Identity(2));
  Eigen::MatrixXd expect(2, 2);
  expect << 1.5, 0, 0, 1;
  CHECK(approx_equal(out.mat(), expect, 1e-14));
  // propagate_covariance falls back to the same value.
  const SymMatrix fb =
      propagate_covariance(symmetrize(c), SymMatrix::Identity(2),
                           Eigen::MatrixXd::Identity(2, 2), SymMatrix::Identity(2));
  CHECK(approx_equal(fb.mat(), expect, 1e-14));
}

TEST_CASE("riccati_step output is exactly symmetric and PSD") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix C = random_psd(rng, 4, 1e-2);
    const SymMatrix M = random_psd(rng, 4);
    const Eigen::MatrixXd A = random_matrix(rng, 4, 4);
    const SymMatrix Q = random_psd(rng, 4);
    const SymMatrix out = riccati_step(C, M, A, Q);
    const Eigen::MatrixXd ot = out.mat().transpose();
    CHECK(out.mat() == ot);
    CHECK(is_psd(out, 1e-9));
  }
}

TEST_CASE("stage_cost basics") {
  Eigen::MatrixXd d(2, 2);
  d << 1, 0, 0, 2;
  const SymMatrix C = symmetrize(d);
  CHECK(stage_cost(C, SymMatrix::Identity(2), CostFn::Trace) == 3.0);
  CHECK(stage_cost(C, SymMatrix::Zero(2), CostFn::Trace) == 0.0);
  CHECK(stage_cost(C, SymMatrix::Identity(2), CostFn::MaxEigenvalue) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(stage_cost(C, SymMatrix::Identity(2), CostFn::Determinant) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("total_cost reproduces the hand-rolled two-step instance") {
  // A=1, Q=1, C0=1, M¹=2 (h=1, r=0.5), M²=1 (h=1, r=1), trace, W=I.
  const Scenario sc = scalar_scenario(1.0, 1.0, 2, {{1.0, 0.5}, {1.0, 1.0}});
  const CostValue cv = total_cost(sc, Schedule::single({1, 1}));
  CHECK(cv.per_step.size() == 2);
  CHECK(cv.per_step[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(cv.per_step[1] == doctest::Approx(15.0 / 11.0).epsilon(1e-14));
  CHECK(cv.total == doctest::Approx(89.0 / 33.0).epsilon(1e-14));
  CHECK(cv.total == cv.per_step[0] + cv.per_step[1]);
}

TEST_CASE("riccati_step accepts a SensorInfoMatrix directly") {
  const Scenario sc = scalar_scenario(1.0, 1.0, 1, {{1.0, 0.5}});
  const SensorInfoMatrix sim = sensor_info_matrix(sc.sensors[0], 0);
  const SymMatrix out = riccati_step(sc.C0, sim, sc.dynamics.A[0], sc.dynamics.Q[0]);
  CHECK(out(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("total_cost of the empty schedule is zero") {
  const Scenario sc = scalar_scenario(1.0, 1.0, 2, {{1.0, 1.0}});
  const CostValue cv = total_cost(sc, Schedule{});
  CHECK(cv.total == 0.0);
  CHECK(cv.per_step.empty());
}

TEST_CASE("zero weights before the terminal step leave only the last term") {
  Scenario sc = scalar_scenario(1.0, 1.0, 3, {{1.0, 1.0}});
  sc.W[0] = SymMatrix::Zero(1);
  sc.W[1] = SymMatrix::Zero(1);
  const CostValue cv = total_cost(sc, Schedule::single({1, 1, 1}));
  CHECK(cv.per_step[0] == 0.0);
  CHECK(cv.per_step[1] == 0.0);
  CHECK(cv.total == cv.per_step[2]);
}

TEST_CASE("total_cost validates schedule length and ids") {
  const Scenario sc = scalar_scenario(1.0, 1.0, 2, {{1.0, 1.0}});
  CHECK_THROWS_AS(total_cost(sc, Schedule::single({1})), std::invalid_argument);
  CHECK_THROWS_AS(total_cost(sc, Schedule::single({1, 9})), std::invalid_argument);
}

TEST_CASE("subset actions fuse information additively") {
  Scenario sc = make_random_scenario(3, 3, 1, 8);
  const SymMatrix m12 = action_info_matrix(sc, Action{1, 2}, 0);
  const SymMatrix m1 = action_info_matrix(sc, Action{1}, 0);
  const SymMatrix m2 = action_info_matrix(sc, Action{2}, 0);
  CHECK(approx_equal(m12.mat(), m1.mat() + m2.mat(), 1e-14));
  CHECK(action_info_matrix(sc, Action{0}, 0).is_zero());
  CHECK_THROWS_AS(action_info_matrix(sc, Action{2, 1}, 0), std::invalid_argument);
}

// Ordering properties of the update; the acceptance suite re-runs these with
// 500 trials each.
TEST_CASE("monotonicity: larger C propagates to larger C") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix small = random_psd(rng, 4, 1e-2);
    const Eigen::MatrixXd l = random_matrix(rng, 4, 4);
    const SymMatrix big = symmetrize(small.mat() + l * l.transpose());
    const SymMatrix M = random_psd(rng, 4);
    const Eigen::MatrixXd A = random_matrix(rng, 4, 4);
    const SymMatrix Q = random_psd(rng, 4);
    const PsdOrder o = psd_compare(riccati_step(small, M, A, Q),
                                   riccati_step(big, M, A, Q), 1e-8);
    CHECK((o == PsdOrder::LessEq || o == PsdOrder::Equal));
  }
}

TEST_CASE("cost ordering holds for all three cost functions") {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix small = random_psd(rng, 4, 1e-2);
    const Eigen::MatrixXd l = random_matrix(rng, 4, 4);
    const SymMatrix big = symmetrize(small.mat() + l * l.transpose());
    const SymMatrix W = random_psd(rng, 4);
    for (CostFn g : {CostFn::Trace, CostFn::Determinant, CostFn::MaxEigenvalue}) {
      const double gb = stage_cost(big, W, g);
      const double gs = stage_cost(small, W, g);
      CHECK(gb >= gs - 1e-9 * std::max(1.0, std::abs(gb)));
    }
  }
}

TEST_CASE("symmetric weighting preserves the ordering") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix small = random_psd(rng, 4, 1e-2);
    const Eigen::MatrixXd l = random_matrix(rng, 4, 4);
    const SymMatrix big = symmetrize(small.mat() + l * l.transpose());
    const Eigen::MatrixXd W = random_psd(rng, 4).mat();
    const SymMatrix ws = symmetrize(W * small.mat() * W.transpose());
    const SymMatrix wb = symmetrize(W * big.mat() * W.transpose());
    const PsdOrder o = psd_compare(ws, wb, 1e-8);
    CHECK((o == PsdOrder::LessEq || o == PsdOrder::Equal));
  }
}

TEST_CASE("stronger information gives smaller propagated covariance") {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix C = random_psd(rng, 4, 1e-2);
    const SymMatrix mj = random_psd(rng, 4);
    const Eigen::MatrixXd l = random_matrix(rng, 4, 4);
    const SymMatrix mi = symmetrize(mj.mat() + l * l.transpose());  // mi ⪰ mj
    const Eigen::MatrixXd A = random_matrix(rng, 4, 4);
    const SymMatrix Q = random_psd(rng, 4);
    const PsdOrder o = psd_compare(riccati_step(C, mi, A, Q),
                                   riccati_step(C, mj, A, Q), 1e-8);
    CHECK((o == PsdOrder::LessEq || o == PsdOrder::Equal));
  }
}
