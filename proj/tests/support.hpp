#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ibp/riccati.hpp"
#include "ibp/rng.hpp"
#include "ibp/scheduler.hpp"
#include "ibp/system_model.hpp"

// Test-side helpers. The brute-force searches here enumerate schedules
// directly through the Riccati primitives and never touch the tree-search
// code paths they are used to check.
namespace test_support {

inline Eigen::MatrixXd random_matrix(ibp::Rng& rng, int rows, int cols,
                                     double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

// L·Lᵀ (+ jitter·I); PSD by construction, PD for jitter > 0.
inline ibp::SymMatrix random_psd(ibp::Rng& rng, int n, double jitter = 0.0) {
  const Eigen::MatrixXd l = random_matrix(rng, n, n);
  return ibp::symmetrize(l * l.transpose() / n +
                         jitter * Eigen::MatrixXd::Identity(n, n));
}

// PSD of the given rank.
inline ibp::SymMatrix random_psd_rank(ibp::Rng& rng, int n, int rank) {
  const Eigen::MatrixXd l = random_matrix(rng, n, rank);
  return ibp::symmetrize(l * l.transpose() / n);
}

inline bool approx_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double tol) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(),
                                 b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

// All candidate actions for one step, lexicographic, independent of the
// scheduler's enumeration.
inline std::vector<ibp::Action> all_actions(int S, int subset_size,
                                            bool virtual_sensor) {
  std::vector<ibp::Action> out;
  if (virtual_sensor) out.push_back(ibp::Action{0});
  std::vector<int> ids(S);
  for (int i = 0; i < S; ++i) ids[i] = i + 1;
  std::vector<int> combo;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(combo.size()) == subset_size) {
      out.push_back(combo);
      return;
    }
    for (int i = start; i < S; ++i) {
      combo.push_back(ids[i]);
      self(self, i + 1);
      combo.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

inline bool satisfies_budget(const ibp::Schedule& sched,
                             const ibp::BudgetConstraint& bc, int S) {
  Eigen::VectorXi load = Eigen::VectorXi::Zero(bc.b.size());
  for (int k = 0; k < sched.length(); ++k) {
    for (int id : sched.steps[k]) {
      if (id >= 1) load += bc.B.col(k * S + id - 1);
    }
  }
  return (load.array() <= bc.b.array()).all();
}

struct BruteForceResult {
  ibp::Schedule schedule;
  double cost = std::numeric_limits<double>::infinity();
  bool found = false;
};

// Full enumeration over all (feasible) schedules; first-in-lex-order wins
// cost ties. Cost is evaluated through total_cost only.
inline BruteForceResult brute_force_best(
    const ibp::Scenario& sc, int subset_size = 1, bool virtual_sensor = false,
    const ibp::BudgetConstraint* budget = nullptr) {
  const auto actions =
      all_actions(sc.num_sensors(), subset_size, virtual_sensor);
  const int N = sc.horizon();
  BruteForceResult best;
  ibp::Schedule cur;
  cur.steps.resize(N);
  auto rec = [&](auto&& self, int k) -> void {
    if (k == N) {
      if (budget && !satisfies_budget(cur, *budget, sc.num_sensors())) return;
      const double c = ibp::total_cost(sc, cur).total;
      if (c < best.cost) {
        best.cost = c;
        best.schedule = cur;
        best.found = true;
      }
      return;
    }
    for (const ibp::Action& a : actions) {
      cur.steps[k] = a;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
  return best;
}

// Minimum over all completions (u_k..u_{N-1}) of the remaining cost
// sum_{n=k+1..N} g_n, starting from covariance C at step k.
inline double brute_force_best_remaining(const ibp::Scenario& sc,
                                         const ibp::SymMatrix& C, int k,
                                         int subset_size = 1) {
  const int N = sc.horizon();
  if (k >= N) return 0.0;
  const auto actions = all_actions(sc.num_sensors(), subset_size, false);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int n, const ibp::SymMatrix& cov,
                 double acc) -> void {
    if (n == N) {
      best = std::min(best, acc);
      return;
    }
    for (const ibp::Action& a : actions) {
      const ibp::SymMatrix M = ibp::action_info_matrix(sc, a, n);
      const ibp::SymMatrix next = ibp::propagate_covariance(
          cov, M, sc.dynamics.A[n], sc.dynamics.Q[n]);
      self(self, n + 1, next, acc + ibp::stage_cost(next, sc.W[n], sc.cost_fn));
    }
  };
  rec(rec, k, C, 0.0);
  return best;
}

// Blank one CSV column (0-based index) in every data row; used to compare
// outputs modulo wall-time fields.
inline std::string csv_mask_column(const std::string& csv, int column) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out << line << '\n';
      header = false;
      continue;
    }
    std::istringstream cells(line);
    std::string cell;
    int idx = 0;
    while (std::getline(cells, cell, ',')) {
      if (idx > 0) out << ',';
      if (idx != column) out << cell;
      ++idx;
    }
    out << '\n';
  }
  return out.str();
}

// Hand-specifiable scalar scenario: A=1, C0, Q, one scalar sensor per given
// (h, r) pair, W=1, trace cost.
inline ibp::Scenario scalar_scenario(double c0, double q, int horizon,
                                     const std::vector<std::pair<double, double>>& hr) {
  ibp::Scenario sc;
  sc.dynamics.n_x = 1;
  sc.dynamics.horizon = horizon;
  sc.dynamics.A.assign(horizon, Eigen::MatrixXd::Constant(1, 1, 1.0));
  sc.dynamics.Q.assign(horizon,
                       ibp::symmetrize(Eigen::MatrixXd::Constant(1, 1, q)));
  int id = 1;
  for (const auto& [h, r] : hr) {
    ibp::Sensor s;
    s.id = id++;
    s.H.assign(horizon, Eigen::MatrixXd::Constant(1, 1, h));
    s.R.assign(horizon, ibp::symmetrize(Eigen::MatrixXd::Constant(1, 1, r)));
    sc.sensors.push_back(std::move(s));
  }
  sc.C0 = ibp::symmetrize(Eigen::MatrixXd::Constant(1, 1, c0));
  sc.x0_mean = Eigen::VectorXd::Zero(1);
  sc.W.assign(horizon, ibp::SymMatrix::Identity(1));
  sc.cost_fn = ibp::CostFn::Trace;
  return sc;
}

}  // namespace test_support
