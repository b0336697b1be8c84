#include "ibp/psd_linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace ibp {

SymMatrix::SymMatrix(const Eigen::MatrixXd& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 1) {
    throw std::invalid_argument("SymMatrix: input must be square, dim >= 1");
  }
  m_ = 0.5 * (raw + raw.transpose());
}

SymMatrix SymMatrix::Identity(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymMatrix SymMatrix::Zero(Eigen::Index n) {
  return SymMatrix(Eigen::MatrixXd::Zero(n, n));
}

SymMatrix symmetrize(const Eigen::MatrixXd& a) { return SymMatrix(a); }

const char* to_string(PsdOrder o) {
  switch (o) {
    case PsdOrder::LessEq: return "LessEq";
    case PsdOrder::GreaterEq: return "GreaterEq";
    case PsdOrder::Equal: return "Equal";
    case PsdOrder::Incomparable: return "Incomparable";
  }
  return "?";
}

namespace {

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigendecomposition failed");
  }
  return es.eigenvalues();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

PsdOrder psd_compare(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("psd_compare: dimension mismatch");
  }
  const double scale = std::max({1.0, max_abs(a.mat()), max_abs(b.mat())});
  const Eigen::VectorXd ev = sym_eigenvalues(b.mat() - a.mat());
  const double slack = tol * scale;
  const bool le = ev.minCoeff() >= -slack;  // B - A is PSD
  const bool ge = ev.maxCoeff() <= slack;   // A - B is PSD
  if (le && ge) return PsdOrder::Equal;
  if (le) return PsdOrder::LessEq;
  if (ge) return PsdOrder::GreaterEq;
  return PsdOrder::Incomparable;
}

bool is_psd(const SymMatrix& a, double tol) {
  const double scale = std::max(1.0, max_abs(a.mat()));
  return sym_eigenvalues(a.mat()).minCoeff() >= -tol * scale;
}

SimDiag sim_diagonalize(const SymMatrix& m1, const SymMatrix& m2,
                        double ridge) {
  if (m1.dim() != m2.dim()) {
    throw std::invalid_argument("sim_diagonalize: dimension mismatch");
  }
  if (ridge < 0.0) {
    throw std::invalid_argument("sim_diagonalize: ridge must be >= 0");
  }
  if (!is_psd(m1) || !is_psd(m2)) {
    throw std::invalid_argument("sim_diagonalize: inputs must be PSD");
  }

  const Eigen::Index n = m1.dim();
  const double delta = ridge * std::max({1.0, m1.trace(), m2.trace()});
  const Eigen::MatrixXd shift = delta * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a = m1.mat() + shift;
  const Eigen::MatrixXd b = m2.mat() + shift;

  // The reduction to a standard symmetric problem needs b to be positive
  // definite; probe the factorization first so failure is reported cleanly.
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "sim_diagonalize: M2 not positive definite after regularization");
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success || !ges.eigenvalues().allFinite() ||
      !ges.eigenvectors().allFinite()) {
    throw std::runtime_error("sim_diagonalize: eigensolver failed");
  }

  SimDiag out;
  out.delta = delta;
  out.eigvals = ges.eigenvalues().cwiseMax(0.0);  // PSD pair: clamp roundoff
  out.eigvecs = ges.eigenvectors();
  // Columns already satisfy vᵀ b v = 1; fix the sign so output is unique.
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    out.eigvecs.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.eigvecs(imax, j) < 0.0) out.eigvecs.col(j) = -out.eigvecs.col(j);
  }
  return out;
}

}  // namespace ibp
