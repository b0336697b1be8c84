#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibp/psd_linalg.hpp"

namespace ibp {

enum class CostFn { Trace, Determinant, MaxEigenvalue };

std::string cost_fn_name(CostFn f);
CostFn cost_fn_from_name(const std::string& name);

// Time-variant linear dynamics x_{k+1} = A_k x_k + w_k, w_k ~ N(0, Q_k).
struct Dynamics {
  std::vector<Eigen::MatrixXd> A;  // one n_x × n_x matrix per step
  std::vector<SymMatrix> Q;        // process noise covariance per step
  int n_x = 0;
  int horizon = 0;  // N
};

// Linear sensor z_k = H_k x + v_k, v_k ~ N(0, R_k), R_k positive definite.
struct Sensor {
  std::vector<Eigen::MatrixXd> H;  // per step, n_z × n_x
  std::vector<SymMatrix> R;        // per step, n_z × n_z
  int id = 0;                      // 1-based index into the bank
};

struct Scenario {
  Dynamics dynamics;
  std::vector<Sensor> sensors;
  SymMatrix C0;             // initial covariance, PD for the information form
  Eigen::VectorXd x0_mean;  // kept for completeness; scheduling ignores it
  std::vector<SymMatrix> W;  // weights for steps k = 1..N
  CostFn cost_fn = CostFn::Trace;

  int n_x() const { return dynamics.n_x; }
  int horizon() const { return dynamics.horizon; }
  int num_sensors() const { return static_cast<int>(sensors.size()); }

  // Throws std::invalid_argument on any dimension inconsistency.
  void validate() const;
};

struct SensorInfoMatrix {
  SymMatrix M;
  int sensor_id = 0;
  int step = 0;
};

// M = Hᵀ R⁻¹ H for the sensor's model at the given step.
// Throws if R is not positive definite.
SensorInfoMatrix sensor_info_matrix(const Sensor& sensor, int step);

// Lower cutoff for randomly drawn measurement-noise variances. The draws are
// nominally uniform on [0,1] but R must stay positive definite.
inline constexpr double kMinNoiseVariance = 1e-3;

// 2-D constant-velocity target with the fixed 8-sensor bank (position and
// velocity components individually, plus the four two-row combinations).
// R is diagonal with entries uniform on [kMinNoiseVariance, 1].
Scenario make_tracking_scenario(double T, double q, int horizon,
                                std::uint64_t rng_seed);

// Randomized instance for oracle testing: per-step A with spectral radius
// <= 1.2, PD Q and C0, full-row-rank H with 1..n_x rows, PD diagonal R.
// Deterministic in rng_seed.
Scenario make_random_scenario(int n_x, int num_sensors, int horizon,
                              std::uint64_t rng_seed);

// First `horizon` steps of a longer scenario.
Scenario truncate_scenario(const Scenario& sc, int horizon);

}  // namespace ibp
