#pragma once

#include <vector>

#include "ibp/psd_linalg.hpp"
#include "ibp/system_model.hpp"

namespace ibp {

// One scheduling decision: the set of sensors fused at a step. A single entry
// in single-sensor mode; sorted and duplicate-free. Id 0 is the virtual
// sensor (no measurement).
using Action = std::vector<int>;

struct Schedule {
  std::vector<Action> steps;

  // Convenience for single-sensor schedules.
  static Schedule single(std::vector<int> ids);
  int length() const { return static_cast<int>(steps.size()); }
  bool operator==(const Schedule&) const = default;
};

struct CostValue {
  double total = 0.0;
  std::vector<double> per_step;  // g_k(W_k C_k W_kᵀ) for k = 1..N
};

// One Riccati step in information form:
//   symmetrize(A (C⁻¹ + M)⁻¹ Aᵀ + Q).
// Throws std::runtime_error when C is not positive definite.
SymMatrix riccati_step(const SymMatrix& C, const SymMatrix& M,
                       const Eigen::MatrixXd& A, const SymMatrix& Q);
SymMatrix riccati_step(const SymMatrix& C, const SensorInfoMatrix& M,
                       const Eigen::MatrixXd& A, const SymMatrix& Q);

// Algebraically equivalent gain-form update, valid for merely PSD C:
//   P = C - C M^½ (I + M^½ C M^½)⁻¹ M^½ C,  result = A P Aᵀ + Q.
SymMatrix riccati_step_gain(const SymMatrix& C, const SymMatrix& M,
                            const Eigen::MatrixXd& A, const SymMatrix& Q);

// Information form when C is invertible, gain form otherwise.
SymMatrix propagate_covariance(const SymMatrix& C, const SymMatrix& M,
                               const Eigen::MatrixXd& A, const SymMatrix& Q);

// g(W C Wᵀ) with g ∈ {trace, determinant, max eigenvalue}, clamped at 0.
double stage_cost(const SymMatrix& C, const SymMatrix& W, CostFn g);

// Information matrix of an action: sum of member sensor information matrices
// (independent measurements fuse additively); the empty action and the
// virtual sensor contribute nothing.
SymMatrix action_info_matrix(const Scenario& sc, const Action& action,
                             int step);

// Rolls the Riccati recursion from C0 through the whole schedule and
// accumulates the weighted per-step costs. Propagation failures are reported
// with the offending step index.
CostValue total_cost(const Scenario& sc, const Schedule& schedule);

}  // namespace ibp
