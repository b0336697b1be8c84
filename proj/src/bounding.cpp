#include "ibp/bounding.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ibp {

namespace {

// Verification slack for the post-check of the covering construction; kept
// well below the tolerances the search relies on (1e-9 relative), so a
// verified cover can never invalidate a branch-and-bound prune.
constexpr double kVerifyTol = 1e-12;
constexpr int kMaxAdjustRetries = 50;

bool covers(const SymMatrix& cover, const SymMatrix& m, CoverKind kind) {
  const PsdOrder o = psd_compare(m, cover, kVerifyTol);
  if (kind == CoverKind::MaxCover) {
    return o == PsdOrder::LessEq || o == PsdOrder::Equal;
  }
  return o == PsdOrder::GreaterEq || o == PsdOrder::Equal;
}

// Eigenvalue floor at zero. Keeps folded covers exactly PSD; for a max cover
// this only adds PSD mass, for a min cover any overshoot is handled by the
// deflation loop.
SymMatrix psd_project(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("psd_project: eigendecomposition failed");
  }
  if (es.eigenvalues().minCoeff() >= 0.0) return m;
  const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  return symmetrize(es.eigenvectors() * d.asDiagonal() *
                    es.eigenvectors().transpose());
}

}  // namespace

SymMatrix bounding_sim_pair(const SymMatrix& m1, const SymMatrix& m2,
                            double ridge, CoverKind kind) {
  const SimDiag sd = sim_diagonalize(m1, m2, ridge);
  const Eigen::Index n = m1.dim();

  // In the joint basis M1 -> diag(lambda), M2 -> I; the extreme of each
  // diagonal entry gives the cover. (Vᵀ)⁻¹ equals (M2 + dI)·V because
  // Vᵀ(M2 + dI)V = I, which avoids an explicit inverse.
  const Eigen::VectorXd d =
      kind == CoverKind::MaxCover
          ? Eigen::VectorXd(sd.eigvals.cwiseMax(1.0))
          : Eigen::VectorXd(sd.eigvals.cwiseMin(1.0));
  const Eigen::MatrixXd b =
      m2.mat() + sd.delta * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd t = b * sd.eigvecs;  // = (Vᵀ)⁻¹
  const SymMatrix base =
      psd_project(symmetrize(t * d.asDiagonal() * t.transpose()));

  // The ridge and the eigensolver perturb the construction at roundoff
  // scale; restore exact-enough domination by scaling before accepting. The
  // deflation factor floors at zero: the zero matrix is dominated by any PSD
  // input, so a min cover always verifies eventually.
  double gamma = 1e-12;
  for (int attempt = 0; attempt <= kMaxAdjustRetries; ++attempt) {
    double factor = 1.0;
    if (attempt > 0) {
      factor = kind == CoverKind::MaxCover ? 1.0 + gamma
                                           : std::max(1.0 - gamma, 0.0);
    }
    const SymMatrix candidate =
        attempt == 0 ? base : SymMatrix(factor * base.mat());
    if (covers(candidate, m1, kind) && covers(candidate, m2, kind)) {
      return candidate;
    }
    if (attempt > 0) gamma *= 2.0;
  }
  throw std::runtime_error(
      "bounding_sim_pair: domination not restored after max retries");
}

SymMatrix bounding_sim_all(const std::vector<SymMatrix>& sims, CoverKind kind,
                           double ridge) {
  if (sims.empty()) {
    throw std::invalid_argument("bounding_sim_all: empty sensor list");
  }
  SymMatrix acc = sims.front();
  for (std::size_t i = 1; i < sims.size(); ++i) {
    acc = bounding_sim_pair(acc, sims[i], ridge, kind);
  }
  return acc;
}

std::vector<BoundingSim> make_bound_cache(const Scenario& sc, CoverKind kind,
                                          double ridge) {
  std::vector<BoundingSim> out;
  out.reserve(sc.horizon());
  for (int k = 0; k < sc.horizon(); ++k) {
    std::vector<SymMatrix> sims;
    sims.reserve(sc.sensors.size());
    for (const Sensor& s : sc.sensors) {
      sims.push_back(sensor_info_matrix(s, k).M);
    }
    out.push_back(BoundingSim{bounding_sim_all(sims, kind, ridge), kind});
  }
  return out;
}

namespace {

double bound_rollout(const SymMatrix& C_k, int k, const Scenario& sc,
                     const std::vector<BoundingSim>& bounds,
                     CoverKind expected) {
  const int N = sc.horizon();
  if (k < 0 || k > N) {
    throw std::invalid_argument("bound rollout: step out of range");
  }
  if (static_cast<int>(bounds.size()) != N) {
    throw std::invalid_argument("bound rollout: cache/horizon mismatch");
  }
  double sum = 0.0;
  SymMatrix C = C_k;
  for (int n = k; n < N; ++n) {
    if (bounds[n].kind != expected) {
      throw std::invalid_argument("bound rollout: wrong cover kind in cache");
    }
    C = propagate_covariance(C, bounds[n].M_bar, sc.dynamics.A[n],
                             sc.dynamics.Q[n]);
    sum += stage_cost(C, sc.W[n], sc.cost_fn);
  }
  return sum;
}

}  // namespace

double lower_bound_remaining(const SymMatrix& C_k, int k, const Scenario& sc,
                             const std::vector<BoundingSim>& bounds) {
  return bound_rollout(C_k, k, sc, bounds, CoverKind::MaxCover);
}

double upper_bound_remaining(const SymMatrix& C_k, int k, const Scenario& sc,
                             const std::vector<BoundingSim>& bounds) {
  return bound_rollout(C_k, k, sc, bounds, CoverKind::MinCover);
}

}  // namespace ibp
