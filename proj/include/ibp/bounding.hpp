#pragma once

#include <vector>

#include "ibp/psd_linalg.hpp"
#include "ibp/riccati.hpp"
#include "ibp/system_model.hpp"

namespace ibp {

// Default ridge applied before the generalized eigenproblem. Low-rank
// measurement matrices (position-only sensors and the like) make information
// matrices singular, and the simultaneous diagonalization needs a definite
// right-hand matrix.
inline constexpr double kDefaultRidge = 1e-10;

enum class CoverKind { MaxCover, MinCover };

struct BoundingSim {
  SymMatrix M_bar;
  CoverKind kind = CoverKind::MaxCover;
};

// Covering information matrix for a pair: simultaneously diagonalize, take
// the element-wise max (MaxCover) or min (MinCover) of the diagonal forms,
// transform back. The result is post-verified to dominate (be dominated by)
// both inputs and is inflated (deflated) by a doubling factor until the check
// holds; throws std::runtime_error when verification cannot be restored.
SymMatrix bounding_sim_pair(const SymMatrix& m1, const SymMatrix& m2,
                            double ridge = kDefaultRidge,
                            CoverKind kind = CoverKind::MaxCover);

// Left fold of bounding_sim_pair over the list (callers pass sensor-id
// ascending order). Single-element lists are returned unchanged.
SymMatrix bounding_sim_all(const std::vector<SymMatrix>& sims, CoverKind kind,
                           double ridge = kDefaultRidge);

// Per-step covers over the scenario's whole sensor bank, computed once and
// shared read-only by every bound evaluation of a search.
std::vector<BoundingSim> make_bound_cache(const Scenario& sc, CoverKind kind,
                                          double ridge = kDefaultRidge);

// Cost of rolling the bounding-sensor recursion from C_k over steps k..N-1:
//   sum of g_n(W_n C̄_n W_nᵀ) for n = k+1..N, with C̄_k = C_k.
// With a MaxCover cache this lower-bounds the remaining cost of every
// completion; 0 when k == N.
double lower_bound_remaining(const SymMatrix& C_k, int k, const Scenario& sc,
                             const std::vector<BoundingSim>& bounds);

// Same rollout with a MinCover cache; upper-bounds the remaining cost of
// every completion (in particular the best one).
double upper_bound_remaining(const SymMatrix& C_k, int k, const Scenario& sc,
                             const std::vector<BoundingSim>& bounds);

}  // namespace ibp
