#include "ibp/riccati.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ibp {

Schedule Schedule::single(std::vector<int> ids) {
  Schedule s;
  s.steps.reserve(ids.size());
  for (int id : ids) s.steps.push_back(Action{id});
  return s;
}

namespace {

void check_dims(const SymMatrix& C, const SymMatrix& M,
                const Eigen::MatrixXd& A, const SymMatrix& Q) {
  const Eigen::Index n = C.dim();
  if (M.dim() != n || A.rows() != n || A.cols() != n || Q.dim() != n) {
    throw std::invalid_argument("riccati_step: dimension mismatch");
  }
}

// Symmetric PSD square root via eigendecomposition, negative roundoff
// eigenvalues clamped.
Eigen::MatrixXd psd_sqrt(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  }
  const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SymMatrix riccati_step(const SymMatrix& C, const SymMatrix& M,
                       const Eigen::MatrixXd& A, const SymMatrix& Q) {
  check_dims(C, M, A, Q);
  const Eigen::Index n = C.dim();
  if (M.is_zero()) {  // pure prediction
    return symmetrize(A * C.mat() * A.transpose() + Q.mat());
  }
  Eigen::LLT<Eigen::MatrixXd> lltC(C.mat());
  if (lltC.info() != Eigen::Success) {
    throw std::runtime_error("riccati_step: C is singular (information form needs invertible C)");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd inner = lltC.solve(I) + M.mat();
  Eigen::LLT<Eigen::MatrixXd> lltInner(inner);
  if (lltInner.info() != Eigen::Success) {
    throw std::runtime_error("riccati_step: C⁻¹ + M not positive definite");
  }
  const Eigen::MatrixXd P = lltInner.solve(I);
  return symmetrize(A * P * A.transpose() + Q.mat());
}

SymMatrix riccati_step(const SymMatrix& C, const SensorInfoMatrix& M,
                       const Eigen::MatrixXd& A, const SymMatrix& Q) {
  return riccati_step(C, M.M, A, Q);
}

SymMatrix riccati_step_gain(const SymMatrix& C, const SymMatrix& M,
                            const Eigen::MatrixXd& A, const SymMatrix& Q) {
  check_dims(C, M, A, Q);
  const Eigen::Index n = C.dim();
  if (M.is_zero()) {
    return symmetrize(A * C.mat() * A.transpose() + Q.mat());
  }
  const Eigen::MatrixXd Mh = psd_sqrt(M);
  const Eigen::MatrixXd S =
      Eigen::MatrixXd::Identity(n, n) + Mh * C.mat() * Mh;
  Eigen::LLT<Eigen::MatrixXd> lltS(0.5 * (S + S.transpose()));
  if (lltS.info() != Eigen::Success) {
    throw std::runtime_error("riccati_step_gain: update factorization failed");
  }
  const Eigen::MatrixXd MhC = Mh * C.mat();
  const Eigen::MatrixXd P = C.mat() - MhC.transpose() * lltS.solve(MhC);
  return symmetrize(A * P * A.transpose() + Q.mat());
}

SymMatrix propagate_covariance(const SymMatrix& C, const SymMatrix& M,
                               const Eigen::MatrixXd& A, const SymMatrix& Q) {
  Eigen::LLT<Eigen::MatrixXd> lltC(C.mat());
  if (lltC.info() == Eigen::Success) return riccati_step(C, M, A, Q);
  return riccati_step_gain(C, M, A, Q);
}

double stage_cost(const SymMatrix& C, const SymMatrix& W, CostFn g) {
  if (W.dim() != C.dim()) {
    throw std::invalid_argument("stage_cost: dimension mismatch");
  }
  const SymMatrix weighted = symmetrize(W.mat() * C.mat() * W.mat().transpose());
  double v = 0.0;
  switch (g) {
    case CostFn::Trace:
      v = weighted.trace();
      break;
    case CostFn::Determinant:
      v = weighted.mat().determinant();
      break;
    case CostFn::MaxEigenvalue: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(weighted.mat(),
                                                        Eigen::EigenvaluesOnly);
      v = es.eigenvalues().maxCoeff();
      break;
    }
  }
  return std::max(v, 0.0);
}

SymMatrix action_info_matrix(const Scenario& sc, const Action& action,
                             int step) {
  const int n = sc.n_x();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  int prev = -1;
  for (int id : action) {
    if (id < 0 || id > sc.num_sensors()) {
      throw std::invalid_argument("action references unknown sensor id " +
                                  std::to_string(id));
    }
    if (id <= prev) {
      throw std::invalid_argument("action ids must be sorted and unique");
    }
    prev = id;
    if (id == 0) continue;  // virtual sensor, M = 0
    sum += sensor_info_matrix(sc.sensors[id - 1], step).M.mat();
  }
  return symmetrize(sum);
}

CostValue total_cost(const Scenario& sc, const Schedule& schedule) {
  const int N = static_cast<int>(schedule.steps.size());
  if (N > 0 && N != sc.horizon()) {
    throw std::invalid_argument("total_cost: schedule length != horizon");
  }
  CostValue out;
  SymMatrix C = sc.C0;
  for (int k = 0; k < N; ++k) {
    const SymMatrix M = action_info_matrix(sc, schedule.steps[k], k);
    try {
      C = propagate_covariance(C, M, sc.dynamics.A[k], sc.dynamics.Q[k]);
    } catch (const std::exception& e) {
      throw std::runtime_error("total_cost: propagation failed at step " +
                               std::to_string(k) + ": " + e.what());
    }
    out.per_step.push_back(stage_cost(C, sc.W[k], sc.cost_fn));
    out.total += out.per_step.back();
  }
  return out;
}

}  // namespace ibp
