#pragma once

#include <Eigen/Dense>

namespace ibp {

// Relative tolerance used by the PSD ordering tests when none is given.
inline constexpr double kDefaultPsdTol = 1e-9;

// Dense symmetric real matrix. The constructor symmetrizes, so every held
// value satisfies m(i,j) == m(j,i) exactly.
class SymMatrix {
 public:
  SymMatrix() = default;  // empty placeholder, dim() == 0
  explicit SymMatrix(const Eigen::MatrixXd& raw);

  static SymMatrix Identity(Eigen::Index n);
  static SymMatrix Zero(Eigen::Index n);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  bool is_zero() const { return m_.isZero(0.0); }

 private:
  Eigen::MatrixXd m_;
};

// (A + Aᵀ)/2. Exactly symmetric and idempotent on symmetric input.
SymMatrix symmetrize(const Eigen::MatrixXd& a);

enum class PsdOrder { LessEq, GreaterEq, Equal, Incomparable };

const char* to_string(PsdOrder o);

// Loewner-order comparison of two symmetric matrices. A ⪯ B is accepted when
// the smallest eigenvalue of B - A is >= -tol * scale, with
// scale = max(1, max|A|, max|B|), so the test is invariant to overall scale.
PsdOrder psd_compare(const SymMatrix& a, const SymMatrix& b,
                     double tol = kDefaultPsdTol);

bool is_psd(const SymMatrix& a, double tol = kDefaultPsdTol);

// Simultaneous diagonalization V, lambda of a PSD pair:
//   Vᵀ (M2 + dI) V = I,   Vᵀ (M1 + dI) V = diag(lambda),
// with d = ridge * max(1, tr M1, tr M2).
struct SimDiag {
  Eigen::MatrixXd eigvecs;  // columns scaled so vᵀ(M2+dI)v = 1; the
                            // largest-magnitude entry of each column is >= 0
  Eigen::VectorXd eigvals;  // ascending, clamped at 0
  double delta = 0.0;       // the ridge shift actually applied
};

SimDiag sim_diagonalize(const SymMatrix& m1, const SymMatrix& m2,
                        double ridge = 0.0);

}  // namespace ibp
