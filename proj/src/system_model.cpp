#include "ibp/system_model.hpp"

#include <algorithm>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "ibp/rng.hpp"

namespace ibp {

std::string cost_fn_name(CostFn f) {
  switch (f) {
    case CostFn::Trace: return "trace";
    case CostFn::Determinant: return "determinant";
    case CostFn::MaxEigenvalue: return "max_eigenvalue";
  }
  return "?";
}

CostFn cost_fn_from_name(const std::string& name) {
  if (name == "trace") return CostFn::Trace;
  if (name == "determinant") return CostFn::Determinant;
  if (name == "max_eigenvalue") return CostFn::MaxEigenvalue;
  throw std::invalid_argument("unknown cost function: " + name);
}

void Scenario::validate() const {
  const int n = n_x();
  const int N = horizon();
  if (n < 1 || N < 1) throw std::invalid_argument("scenario: n_x and N must be >= 1");
  if (static_cast<int>(dynamics.A.size()) != N ||
      static_cast<int>(dynamics.Q.size()) != N) {
    throw std::invalid_argument("scenario: dynamics lists must have length N");
  }
  for (int k = 0; k < N; ++k) {
    if (dynamics.A[k].rows() != n || dynamics.A[k].cols() != n) {
      throw std::invalid_argument("scenario: A dimension mismatch");
    }
    if (dynamics.Q[k].dim() != n) {
      throw std::invalid_argument("scenario: Q dimension mismatch");
    }
  }
  if (sensors.empty()) throw std::invalid_argument("scenario: at least one sensor required");
  for (const Sensor& s : sensors) {
    if (static_cast<int>(s.H.size()) != N || static_cast<int>(s.R.size()) != N) {
      throw std::invalid_argument("scenario: sensor lists must have length N");
    }
    for (int k = 0; k < N; ++k) {
      if (s.H[k].cols() != n || s.H[k].rows() < 1) {
        throw std::invalid_argument("scenario: H dimension mismatch");
      }
      if (s.R[k].dim() != s.H[k].rows()) {
        throw std::invalid_argument("scenario: R dimension mismatch");
      }
    }
  }
  if (C0.dim() != n) throw std::invalid_argument("scenario: C0 dimension mismatch");
  if (x0_mean.size() != n) throw std::invalid_argument("scenario: x0_mean dimension mismatch");
  if (static_cast<int>(W.size()) != N) {
    throw std::invalid_argument("scenario: W must have length N");
  }
  for (const SymMatrix& w : W) {
    if (w.dim() != n) throw std::invalid_argument("scenario: W dimension mismatch");
  }
}

SensorInfoMatrix sensor_info_matrix(const Sensor& sensor, int step) {
  if (step < 0 || step >= static_cast<int>(sensor.H.size())) {
    throw std::invalid_argument("sensor_info_matrix: step out of range");
  }
  const Eigen::MatrixXd& H = sensor.H[step];
  const Eigen::MatrixXd& R = sensor.R[step].mat();
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("sensor_info_matrix: R is not positive definite");
  }
  // Hᵀ R⁻¹ H via triangular solves.
  const Eigen::MatrixXd RinvH = llt.solve(H);
  return SensorInfoMatrix{symmetrize(H.transpose() * RinvH), sensor.id, step};
}

Scenario make_tracking_scenario(double T, double q, int horizon,
                                std::uint64_t rng_seed) {
  if (T <= 0.0 || q < 0.0 || horizon < 1) {
    throw std::invalid_argument("make_tracking_scenario: bad parameters");
  }
  const int n = 4;
  Eigen::Matrix2d cv;
  cv << 1.0, T, 0.0, 1.0;
  Eigen::Matrix2d diff;
  diff << T * T * T / 3.0, T * T / 2.0, T * T / 2.0, T;
  const Eigen::MatrixXd A =
      Eigen::kroneckerProduct(Eigen::Matrix2d::Identity(), cv);
  const Eigen::MatrixXd Q =
      q * Eigen::kroneckerProduct(Eigen::Matrix2d::Identity(), diff);

  // Single-coordinate sensors plus the four two-row stacks.
  std::vector<Eigen::MatrixXd> bank;
  for (int i = 0; i < 4; ++i) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1, n);
    h(0, i) = 1.0;
    bank.push_back(h);
  }
  const int pairs[4][2] = {{0, 2}, {1, 3}, {0, 1}, {2, 3}};
  for (const auto& p : pairs) {
    Eigen::MatrixXd h(2, n);
    h.row(0) = bank[p[0]];
    h.row(1) = bank[p[1]];
    bank.push_back(h);
  }

  Rng rng(rng_seed);
  Scenario sc;
  sc.dynamics.n_x = n;
  sc.dynamics.horizon = horizon;
  sc.dynamics.A.assign(horizon, A);
  sc.dynamics.Q.assign(horizon, symmetrize(Q));
  for (int i = 0; i < 8; ++i) {
    Sensor s;
    s.id = i + 1;
    const Eigen::Index rows = bank[i].rows();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      R(r, r) = rng.uniform(kMinNoiseVariance, 1.0);
    }
    s.H.assign(horizon, bank[i]);
    s.R.assign(horizon, symmetrize(R));
    sc.sensors.push_back(std::move(s));
  }
  sc.C0 = SymMatrix::Identity(n);
  sc.x0_mean = Eigen::Vector4d(0.0, 1.0, 0.0, 1.0);
  sc.W.assign(horizon, SymMatrix::Identity(n));
  sc.cost_fn = CostFn::Trace;
  return sc;
}

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

double spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Scenario make_random_scenario(int n_x, int num_sensors, int horizon,
                              std::uint64_t rng_seed) {
  if (n_x < 1 || num_sensors < 1 || horizon < 1) {
    throw std::invalid_argument("make_random_scenario: bad parameters");
  }
  Rng rng(rng_seed);
  Scenario sc;
  sc.dynamics.n_x = n_x;
  sc.dynamics.horizon = horizon;
  for (int k = 0; k < horizon; ++k) {
    Eigen::MatrixXd A = random_matrix(rng, n_x, n_x);
    const double rho = spectral_radius(A);
    if (rho > 1.2) A *= 1.2 / rho;
    sc.dynamics.A.push_back(A);
    const Eigen::MatrixXd L = random_matrix(rng, n_x, n_x);
    sc.dynamics.Q.push_back(symmetrize(
        L * L.transpose() / n_x + 1e-3 * Eigen::MatrixXd::Identity(n_x, n_x)));
  }
  for (int i = 1; i <= num_sensors; ++i) {
    Sensor s;
    s.id = i;
    const int rows = rng.uniform_int(1, n_x);
    Eigen::MatrixXd H;
    for (;;) {  // redraw until comfortably full row rank
      H = random_matrix(rng, rows, n_x);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) > 1e-6 * std::max(1.0, sv(0))) break;
    }
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows, rows);
    for (int r = 0; r < rows; ++r) {
      R(r, r) = rng.uniform(kMinNoiseVariance, 1.0);
    }
    s.H.assign(horizon, H);
    s.R.assign(horizon, symmetrize(R));
    sc.sensors.push_back(std::move(s));
  }
  const Eigen::MatrixXd L0 = random_matrix(rng, n_x, n_x);
  sc.C0 = symmetrize(L0 * L0.transpose() / n_x +
                     0.1 * Eigen::MatrixXd::Identity(n_x, n_x));
  sc.x0_mean = Eigen::VectorXd::Zero(n_x);
  sc.W.assign(horizon, SymMatrix::Identity(n_x));
  sc.cost_fn = CostFn::Trace;
  return sc;
}

Scenario truncate_scenario(const Scenario& sc, int horizon) {
  if (horizon < 1 || horizon > sc.horizon()) {
    throw std::invalid_argument("truncate_scenario: horizon out of range");
  }
  Scenario out = sc;
  out.dynamics.horizon = horizon;
  out.dynamics.A.resize(horizon);
  out.dynamics.Q.resize(horizon);
  for (Sensor& s : out.sensors) {
    s.H.resize(horizon);
    s.R.resize(horizon);
  }
  out.W.resize(horizon);
  return out;
}

}  // namespace ibp
