#pragma once

// Real skew-symmetric linear algebra and fermionic-linear-optics state
// mechanics. Matrices are indexed from 0 internally; Majorana operator m_j
// with the usual 1-based label j lives at row/column j - 1.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fgw/errors.hpp"

namespace fgw {

using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double kAntisymmetry = 1e-12;
inline constexpr double kPurity = 1e-10;
inline constexpr double kPurityEvolved = 1e-9;
inline constexpr double kOrthogonality = 1e-10;
inline constexpr double kDeterminant = 1e-8;
inline constexpr double kEntryBound = 1e-10;
inline constexpr double kZeroMode = 1e-10;
inline constexpr double kPfaffianPivot = 1e-14;
}  // namespace tol

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// ‖MᵀM - I‖_max.
inline double purity_defect(const Matrix& m) {
  return max_abs(m.transpose() * m - Matrix::Identity(m.rows(), m.cols()));
}

// ---------------------------------------------------------------------------
// SkewMatrix
// ---------------------------------------------------------------------------

/// Real antisymmetric matrix of even dimension 2L. Holds coupling matrices
/// and is the storage of every covariance matrix.
class SkewMatrix {
 public:
  SkewMatrix() = default;

  int dim() const { return static_cast<int>(m_.rows()); }
  int modes() const { return dim() / 2; }
  const Matrix& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  /// Antisymmetrizes `x` without validation. For results of operations that
  /// preserve antisymmetry analytically (conjugation, products of
  /// propagators) where only roundoff separates x from -xᵀ.
  static SkewMatrix antisymmetrized(const Matrix& x) {
    SkewMatrix s;
    s.m_ = 0.5 * (x - x.transpose());
    return s;
  }

 private:
  Matrix m_;
};

/// Validating constructor. Symmetric parts up to 1e-12 are projected away.
inline SkewMatrix make_skew(int dim, const Matrix& entries) {
  if (dim <= 0 || dim % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "dimension must be even and positive, got " + std::to_string(dim));
  }
  if (entries.rows() != dim || entries.cols() != dim) {
    throw Error(ErrorKind::InvalidDimension, "entries are not " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  if (!all_finite(entries)) throw Error(ErrorKind::NumericalFailure, "non-finite matrix entry");
  const double asym = max_abs(entries + entries.transpose());
  if (asym > tol::kAntisymmetry) {
    throw Error(ErrorKind::NotAntisymmetric, "max |X + Xᵀ| = " + std::to_string(asym));
  }
  return SkewMatrix::antisymmetrized(entries);
}

/// Row-major overload used by file readers.
inline SkewMatrix make_skew(int dim, std::span<const double> row_major) {
  if (dim <= 0 || dim % 2 != 0) {
    throw Error(ErrorKind::InvalidDimension, "dimension must be even and positive, got " + std::to_string(dim));
  }
  if (row_major.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
    throw Error(ErrorKind::InvalidDimension, "expected " + std::to_string(dim * dim) + " entries, got " +
                                                 std::to_string(row_major.size()));
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = row_major[static_cast<std::size_t>(r) * dim + c];
  return make_skew(dim, m);
}

// ---------------------------------------------------------------------------
// CovarianceMatrix
// ---------------------------------------------------------------------------

/// Covariance matrix M_jk = (i/2) tr([m_j, m_k] ρ) of an L-mode state.
/// Entries lie in [-1, 1] and ‖M‖ ≤ 1; pure Gaussian states have MᵀM = I.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;

  /// Validates the entry and spectral-norm bounds.
  static CovarianceMatrix from(const SkewMatrix& base) {
    const Matrix& m = base.matrix();
    if (max_abs(m) > 1.0 + tol::kEntryBound) {
      throw Error(ErrorKind::InvalidData, "covariance entry outside [-1, 1]");
    }
    if (fgw::purity_defect(m) > tol::kPurity) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m, Eigen::EigenvaluesOnly);
      const double norm = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
      if (norm > 1.0 + tol::kEntryBound) {
        throw Error(ErrorKind::InvalidData, "covariance spectral norm " + std::to_string(norm) + " exceeds 1");
      }
    }
    return unchecked(base);
  }

  /// For outputs of operations that preserve the invariants analytically.
  static CovarianceMatrix unchecked(SkewMatrix base) {
    CovarianceMatrix c;
    c.base_ = std::move(base);
    return c;
  }

  const SkewMatrix& skew() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }
  int dim() const { return base_.dim(); }
  int modes() const { return base_.modes(); }
  double operator()(int row, int col) const { return base_(row, col); }

  double purity_defect() const { return fgw::purity_defect(matrix()); }
  bool is_pure(double tolerance = tol::kPurity) const { return purity_defect() <= tolerance; }

 private:
  SkewMatrix base_;
};

// ---------------------------------------------------------------------------
// ModeRotation
// ---------------------------------------------------------------------------

/// Special-orthogonal mode-space propagator Q, acting on Majorana operators
/// as m_j -> Σ_k Q_jk m_k.
class ModeRotation {
 public:
  ModeRotation() = default;

  static ModeRotation from(const Matrix& q) {
    if (q.rows() != q.cols() || q.rows() == 0 || q.rows() % 2 != 0) {
      throw Error(ErrorKind::InvalidDimension, "rotation must be square with even dimension");
    }
    if (!all_finite(q)) throw Error(ErrorKind::NumericalFailure, "non-finite rotation entry");
    if (purity_defect(q) > tol::kOrthogonality) {
      throw Error(ErrorKind::InvalidData, "rotation is not orthogonal");
    }
    if (std::abs(q.determinant() - 1.0) > tol::kDeterminant) {
      throw Error(ErrorKind::InvalidData, "rotation determinant is not +1");
    }
    return unchecked(q);
  }

  static ModeRotation unchecked(Matrix q) {
    ModeRotation r;
    r.q_ = std::move(q);
    return r;
  }

  static ModeRotation identity(int dim) { return unchecked(Matrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(q_.rows()); }
  const Matrix& matrix() const { return q_; }
  double operator()(int row, int col) const { return q_(row, col); }

  ModeRotation operator*(const ModeRotation& rhs) const {
    if (rhs.dim() != dim()) throw Error(ErrorKind::InvalidDimension, "rotation dimensions differ");
    return unchecked(q_ * rhs.q_);
  }

  ModeRotation transpose() const { return unchecked(q_.transpose()); }

 private:
  Matrix q_;
};

/// Q^n by repeated squaring.
inline ModeRotation power(const ModeRotation& q, int n) {
  if (n < 0) throw Error(ErrorKind::ContractViolation, "negative rotation power");
  Matrix result = Matrix::Identity(q.dim(), q.dim());
  Matrix base = q.matrix();
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return ModeRotation::unchecked(std::move(result));
}

// ---------------------------------------------------------------------------
// FockString
// ---------------------------------------------------------------------------

/// Occupation pattern ω ∈ {0,1}^L of a Fock basis state.
class FockString {
 public:
  FockString() = default;
  explicit FockString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw Error(ErrorKind::InvalidDimension, "Fock string needs at least one mode");
    for (auto b : bits_) {
      if (b > 1) throw Error(ErrorKind::InvalidData, "Fock string entries must be 0 or 1");
    }
  }

  static FockString zeros(int modes) { return FockString(std::vector<std::uint8_t>(modes, 0)); }
  static FockString ones(int modes) { return FockString(std::vector<std::uint8_t>(modes, 1)); }

  int modes() const { return static_cast<int>(bits_.size()); }
  int operator[](int k) const { return bits_[k]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool operator==(const FockString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

namespace detail {

// Dense Hermitian eigendecomposition of iA. Eigenvalues are real and come in
// ± pairs; eigenvectors with eigenvalue λ > 0 encode the normal-mode pairs.
inline Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_eigen(const SkewMatrix& a) {
  const ComplexMatrix ia = std::complex<double>(0.0, 1.0) * a.matrix().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ia);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "eigendecomposition did not converge");
  return es;
}

inline constexpr int kSpectralExpMaxDim = 2000;

}  // namespace detail

/// Propagator Q = exp(tA). Spectral route through the Hermitian matrix iA,
/// which keeps Q orthogonal to roundoff; Padé scaling-and-squaring above
/// dimension 2000.
inline ModeRotation skew_exp(const SkewMatrix& a, double t) {
  if (!std::isfinite(t) || !all_finite(a.matrix())) {
    throw Error(ErrorKind::NumericalFailure, "non-finite input to skew_exp");
  }
  const int n = a.dim();
  Matrix q;
  if (t == 0.0) {
    q = Matrix::Identity(n, n);
  } else if (n <= detail::kSpectralExpMaxDim) {
    const auto es = detail::hermitian_eigen(a);
    const ComplexMatrix& v = es.eigenvectors();
    // A = -i V Λ V^H  =>  exp(tA) = V exp(-i t Λ) V^H
    Eigen::VectorXcd phase(n);
    for (int k = 0; k < n; ++k) phase(k) = std::polar(1.0, -t * es.eigenvalues()(k));
    q = (v * phase.asDiagonal() * v.adjoint()).real();
  } else {
    q = (t * a.matrix()).exp();
  }
  if (!all_finite(q)) throw Error(ErrorKind::NumericalFailure, "non-finite propagator");
  return ModeRotation::unchecked(std::move(q));
}

/// Covariance of the Fock state |ω⟩: blocks (1 - 2ω_k)·[[0,-1],[1,0]].
inline CovarianceMatrix fock_covariance(const FockString& omega) {
  const int l = omega.modes();
  Matrix m = Matrix::Zero(2 * l, 2 * l);
  for (int k = 0; k < l; ++k) {
    const double s = 1.0 - 2.0 * omega[k];
    m(2 * k, 2 * k + 1) = -s;
    m(2 * k + 1, 2 * k) = s;
  }
  return CovarianceMatrix::unchecked(SkewMatrix::antisymmetrized(m));
}

/// Q M Qᵀ: the covariance of U ρ U† when U acts on modes through Q.
inline CovarianceMatrix conjugate(const CovarianceMatrix& m, const ModeRotation& q) {
  if (m.dim() != q.dim()) throw Error(ErrorKind::InvalidDimension, "covariance and rotation dimensions differ");
  const Matrix r = q.matrix() * m.matrix() * q.matrix().transpose();
  return CovarianceMatrix::unchecked(SkewMatrix::antisymmetrized(r));
}

/// Pfaffian by Parlett-Reid tridiagonalization with partial pivoting.
/// Pf([[0,a],[-a,0]]) = a. A pivot below 1e-14 (relative to the largest
/// entry) means the matrix is singular and the result is exactly 0.
inline double pfaffian(const SkewMatrix& a) {
  if (!all_finite(a.matrix())) throw Error(ErrorKind::NumericalFailure, "non-finite input to pfaffian");
  Matrix w = a.matrix();
  const int n = a.dim();
  const double scale = max_abs(w);
  if (scale == 0.0) return 0.0;
  const double pivot_floor = tol::kPfaffianPivot * scale;

  double pf = 1.0;
  for (int k = 0; k < n - 1; k += 2) {
    // largest entry in column k below the diagonal
    Eigen::Index offset = 0;
    w.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&offset);
    const int kp = k + 1 + static_cast<int>(offset);
    if (kp != k + 1) {
      w.row(k + 1).swap(w.row(kp));
      w.col(k + 1).swap(w.col(kp));
      pf = -pf;
    }
    if (std::abs(w(k + 1, k)) < pivot_floor) return 0.0;
    pf *= w(k, k + 1);

    if (k + 2 < n) {
      const int rest = n - k - 2;
      const Eigen::VectorXd tau = w.row(k).tail(rest).transpose() / w(k, k + 1);
      const Eigen::VectorXd col = w.col(k + 1).tail(rest);
      w.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

/// |⟨σ^z_1 ⋯ σ^z_n⟩| = |Pf(M restricted to Majorana indices 1..2n)|.
inline double zstring_expectation(const CovarianceMatrix& m, int n) {
  if (n < 1 || n > m.modes()) {
    throw Error(ErrorKind::InvalidDimension, "string length " + std::to_string(n) + " outside 1.." +
                                                 std::to_string(m.modes()));
  }
  const Matrix block = m.matrix().topLeftCorner(2 * n, 2 * n);
  return std::abs(pfaffian(SkewMatrix::antisymmetrized(block)));
}

/// Ground-state covariance of H(A) = (i/4) Σ A_jk m_j m_k.
///
/// With iA v = ε v, ε > 0 and v = x + i y, the real pair (√2 y, √2 x) spans a
/// normal mode in which A is [[0, ε], [-ε, 0]]; the ground state leaves every
/// such mode empty, contributing the block [[0,-1],[1,0]].
inline CovarianceMatrix ground_state_covariance(const SkewMatrix& a) {
  if (!all_finite(a.matrix())) throw Error(ErrorKind::NumericalFailure, "non-finite coupling matrix");
  const int n = a.dim();
  const auto es = detail::hermitian_eigen(a);
  const Eigen::VectorXd& eps = es.eigenvalues();
  if (eps.cwiseAbs().minCoeff() < tol::kZeroMode) {
    throw Error(ErrorKind::DegenerateGroundState, "coupling matrix has a zero mode");
  }
  Matrix m = Matrix::Zero(n, n);
  const double root2 = std::sqrt(2.0);
  // eigenvalues are sorted ascending; the upper half are the positive ones
  for (int c = n / 2; c < n; ++c) {
    const Eigen::VectorXcd v = es.eigenvectors().col(c);
    const Eigen::VectorXd r1 = root2 * v.imag();
    const Eigen::VectorXd r2 = root2 * v.real();
    m += r2 * r1.transpose() - r1 * r2.transpose();
  }
  return CovarianceMatrix::unchecked(SkewMatrix::antisymmetrized(m));
}

/// tr[ρ₁ρ₂] = 2^{-L} |det(I - M₁M₂)|^{1/2} for pure Gaussian states.
inline double gaussian_overlap(const CovarianceMatrix& m1, const CovarianceMatrix& m2) {
  if (m1.dim() != m2.dim()) throw Error(ErrorKind::InvalidDimension, "covariance dimensions differ");
  if (!m1.is_pure() || !m2.is_pure()) throw Error(ErrorKind::NotPure, "gaussian_overlap needs pure states");
  const int n = m1.dim();
  const Matrix g = Matrix::Identity(n, n) - m1.matrix() * m2.matrix();
  Eigen::PartialPivLU<Matrix> lu(g);
  const Matrix& packed = lu.matrixLU();
  double log_abs_det = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = std::abs(packed(k, k));
    if (d == 0.0) return 0.0;
    log_abs_det += std::log(d);
  }
  return std::exp(0.5 * log_abs_det - m1.modes() * std::log(2.0));
}

}  // namespace fgw
