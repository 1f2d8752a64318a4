#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "dmimo/errors.hpp"

namespace dmimo {

using Complex = std::complex<double>;
using EigenMatrix = Eigen::MatrixXcd;

/// Dense complex matrix with at least one row and one column and finite
/// entries. Thin wrapper over Eigen so the invariants are checked once at the
/// boundary; arithmetic is done on `eigen()`.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(EigenMatrix m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.cols() < 1) {
      throw DimensionError("ComplexMatrix requires rows >= 1 and cols >= 1");
    }
    if (!m_.allFinite()) throw DomainError("ComplexMatrix entries must be finite");
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
      : ComplexMatrix(from_rows(rows)) {}

  static ComplexMatrix identity(Eigen::Index n) {
    return ComplexMatrix(EigenMatrix::Identity(n, n));
  }

  static ComplexMatrix zero(Eigen::Index rows, Eigen::Index cols) {
    return ComplexMatrix(EigenMatrix::Zero(rows, cols));
  }

  Eigen::Index rows() const noexcept { return m_.rows(); }
  Eigen::Index cols() const noexcept { return m_.cols(); }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }
  const EigenMatrix& eigen() const noexcept { return m_; }

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.m_ == b.m_;
  }

 private:
  static EigenMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.begin()->size());
    EigenMatrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Eigen::Index>(row.size()) != c) {
        throw DimensionError("ComplexMatrix rows must have equal length");
      }
      Eigen::Index j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  EigenMatrix m_;
};

/// H * H^H.
inline ComplexMatrix hermitian_gram(const ComplexMatrix& h) {
  EigenMatrix g = h.eigen() * h.eigen().adjoint();
  return ComplexMatrix(std::move(g));
}

namespace detail {

// log2 det of a Hermitian positive-definite matrix from its Cholesky factor.
inline double log2_det_cholesky(const EigenMatrix& m) {
  const Eigen::Index n = m.rows();
  EigenMatrix l = EigenMatrix::Zero(n, n);
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = m(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) throw DomainError("matrix is not positive definite");
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    log_det += std::log2(ljj);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Complex s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return 2.0 * log_det;
}

}  // namespace detail

/// log2 det(scale * A + I) for Hermitian PSD A.
///
/// A is symmetrized as (A + A^H)/2 first. The determinant is accumulated in
/// log space from a Cholesky factor, so large SNR arguments do not overflow.
inline double log_det_capacity(const ComplexMatrix& a, double scale) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << "log_det_capacity needs a square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(msg.str());
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw DomainError("log_det_capacity scale must be finite and >= 0");
  }
  const EigenMatrix sym = 0.5 * (a.eigen() + a.eigen().adjoint());
  const double trace = sym.diagonal().real().sum();
  const Eigen::SelfAdjointEigenSolver<EigenMatrix> eig(sym, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-9 * std::abs(trace)) {
    std::ostringstream msg;
    msg << "log_det_capacity needs a PSD matrix, smallest eigenvalue " << min_eig;
    throw DomainError(msg.str());
  }
  const EigenMatrix m = scale * sym + EigenMatrix::Identity(sym.rows(), sym.cols());
  return std::max(0.0, detail::log2_det_cholesky(m));
}

/// Relative singular-value cutoff below which a matrix counts as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Moore-Penrose pseudo-inverse of a full-rank matrix, via SVD. For the wide
/// channel matrices used by zero forcing (rows <= cols) this is a right
/// inverse, H * pinv(H) = I. Tall full-column-rank input is accepted so the
/// pseudo-inverse can be applied twice.
inline ComplexMatrix pseudo_inverse(const ComplexMatrix& h) {
  const Eigen::JacobiSVD<EigenMatrix> svd(h.eigen(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double largest = sigma(0);
  const double smallest = sigma(sigma.size() - 1);
  const double ratio = largest > 0.0 ? smallest / largest : 0.0;
  if (!(ratio > kRankTolerance)) {
    std::ostringstream msg;
    msg << "pseudo_inverse: rank deficient, singular value ratio " << ratio;
    throw SingularityError(msg.str(), ratio);
  }
  EigenMatrix pinv = svd.matrixV() * sigma.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  return ComplexMatrix(std::move(pinv));
}

}  // namespace dmimo
