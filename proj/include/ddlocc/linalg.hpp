#pragma once

// Dense bipartite operator toolkit: block access, marginals, partial transpose,
// local-unitary conjugation, dd-checks and Gram construction.
//
// Block convention: an operator on C^dimA (x) C^dimB is split into dimA x dimA
// blocks of order dimB. block(i, j) is 0-based; flat index of (i, b) is dimB * i + b,
// i.e. the ordinary Kronecker ordering.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ddlocc/errors.hpp"

namespace ddlocc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianWarnTol = 1e-8;
// Inputs further than this from Hermitian are rejected rather than symmetrized.
inline constexpr double kHermitianRejectTol = 1e-6;

namespace detail {

inline void warn(const std::string& msg) { std::clog << "ddlocc warning: " << msg << '\n'; }

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace detail

inline double hermiticity_defect(const CMatrix& m) { return detail::max_abs(m - m.adjoint()); }

inline bool is_hermitian(const CMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

inline double unitarity_defect(const CMatrix& u) {
  return detail::max_abs(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-10) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// Hermitian operator on C^dimA (x) C^dimB with block accessors.
class BipartiteOperator {
 public:
  BipartiteOperator() = default;

  /// Validates the shape, rejects non-finite entries and symmetrizes (M + M^dagger)/2.
  BipartiteOperator(int dim_a, int dim_b, CMatrix m) : dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a <= 0 || dim_b <= 0) throw StructuralError("bipartite dimensions must be positive");
    if (m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
      std::ostringstream os;
      os << "operator of order " << m.rows() << "x" << m.cols() << " does not match " << dim_a
         << "x" << dim_b;
      throw StructuralError(os.str());
    }
    if (!detail::all_finite(m)) throw PreconditionError("operator has non-finite entries");
    const double defect = hermiticity_defect(m);
    const double scale = std::max(1.0, detail::max_abs(m));
    if (defect > kHermitianRejectTol * scale) {
      throw PreconditionError("operator is not Hermitian (defect " + std::to_string(defect) + ")");
    }
    if (defect > kHermitianWarnTol) {
      detail::warn("symmetrizing operator with Hermiticity defect " + std::to_string(defect));
    }
    matrix_ = (m + m.adjoint()) / 2.0;
  }

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  int order() const { return dim_a_ * dim_b_; }
  const CMatrix& matrix() const { return matrix_; }

  CMatrix block(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim_a_ || j >= dim_a_) throw StructuralError("block index out of range");
    return matrix_.block(i * dim_b_, j * dim_b_, dim_b_, dim_b_);
  }

  std::vector<CMatrix> diagonal_blocks() const {
    std::vector<CMatrix> out;
    out.reserve(dim_a_);
    for (int i = 0; i < dim_a_; ++i) out.push_back(block(i, i));
    return out;
  }

 private:
  int dim_a_ = 0;
  int dim_b_ = 0;
  CMatrix matrix_;
};

/// Real symmetric bipartite operator (the LO setting).
struct RealSymmetricOperator {
  int dim_a = 0;
  int dim_b = 0;
  RMatrix matrix;

  RealSymmetricOperator() = default;
  RealSymmetricOperator(int a, int b, RMatrix m) : dim_a(a), dim_b(b), matrix(std::move(m)) {
    if (a <= 0 || b <= 0 || matrix.rows() != a * b || matrix.cols() != a * b) {
      throw StructuralError("real operator shape does not match dimensions");
    }
    if (!matrix.allFinite()) throw PreconditionError("operator has non-finite entries");
    const double defect = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (defect > kHermitianRejectTol * std::max(1.0, matrix.cwiseAbs().maxCoeff())) {
      throw PreconditionError("real operator is not symmetric");
    }
    if (defect > kHermitianWarnTol) detail::warn("symmetrizing real operator");
    matrix = (matrix + matrix.transpose()) / 2.0;
  }

  RMatrix block(int i, int j) const { return matrix.block(i * dim_b, j * dim_b, dim_b, dim_b); }

  /// Membership flag for "every block symmetric" (equivalently M^{Gamma_B} = M).
  bool blocks_symmetric(double tol = 1e-12) const {
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j) {
        RMatrix b = block(i, j);
        if ((b - b.transpose()).cwiseAbs().maxCoeff() > tol) return false;
      }
    return true;
  }

  BipartiteOperator to_complex() const { return {dim_a, dim_b, matrix.cast<Complex>()}; }
};

struct Marginals {
  CMatrix a;  // dimA x dimA, (M_A)_{ik} = tr block(i,k)
  CMatrix b;  // dimB x dimB, M_B = sum_i block(i,i)
};

inline Marginals marginals(const BipartiteOperator& m) {
  const int da = m.dim_a(), db = m.dim_b();
  Marginals out{CMatrix::Zero(da, da), CMatrix::Zero(db, db)};
  for (int i = 0; i < da; ++i) {
    for (int k = 0; k < da; ++k) out.a(i, k) = m.matrix().block(i * db, k * db, db, db).trace();
    out.b += m.matrix().block(i * db, i * db, db, db);
  }
  return out;
}

inline BipartiteOperator partial_transpose_b(const BipartiteOperator& m) {
  const int da = m.dim_a(), db = m.dim_b();
  CMatrix out(m.order(), m.order());
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = m.matrix().block(i * db, j * db, db, db).transpose();
  return {da, db, std::move(out)};
}

/// (U (x) V) M (U (x) V)^dagger. Throws PreconditionError if either factor is not unitary.
inline BipartiteOperator lu_conjugate(const CMatrix& u, const CMatrix& v, const BipartiteOperator& m,
                                      double tol = 1e-10) {
  if (u.rows() != m.dim_a() || u.cols() != m.dim_a() || v.rows() != m.dim_b() ||
      v.cols() != m.dim_b()) {
    throw StructuralError("local unitary factors do not match operator dimensions");
  }
  if (!is_unitary(u, tol) || !is_unitary(v, tol)) {
    throw PreconditionError("local factor is not unitary within tolerance");
  }
  const CMatrix k = kron(u, v);
  return {m.dim_a(), m.dim_b(), k * m.matrix() * k.adjoint()};
}

/// Frobenius norm of the off-diagonal parts of the diagonal blocks of a block matrix.
inline double dd_residual(const CMatrix& m, int dim_a, int dim_b) {
  double sum = 0.0;
  for (int i = 0; i < dim_a; ++i)
    for (int a = 0; a < dim_b; ++a)
      for (int b = 0; b < dim_b; ++b)
        if (a != b) sum += std::norm(m(i * dim_b + a, i * dim_b + b));
  return std::sqrt(sum);
}

struct DDCheck {
  bool dd = false;
  double residual = 0.0;
};

inline DDCheck is_dd(const BipartiteOperator& m, double tol = 1e-10) {
  const double r = dd_residual(m.matrix(), m.dim_a(), m.dim_b());
  return {r <= tol, r};
}

struct MonomialCheck {
  bool monomial = false;
  // permutation[row] = column of the unit-modulus entry, -1 where none was found.
  std::vector<int> permutation;
};

inline MonomialCheck is_monomial(const CMatrix& u, double tol = 1e-10) {
  if (u.rows() != u.cols()) throw StructuralError("monomial test needs a square matrix");
  if (!is_unitary(u, std::max(tol, 1e-10))) throw PreconditionError("monomial test needs a unitary matrix");
  const auto n = u.rows();
  MonomialCheck out;
  out.permutation.assign(n, -1);
  std::vector<int> col_hits(n, 0);
  bool ok = true;
  for (Eigen::Index r = 0; r < n; ++r) {
    int hits = 0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double a = std::abs(u(r, c));
      if (a >= 1.0 - tol) {
        ++hits;
        ++col_hits[c];
        out.permutation[r] = static_cast<int>(c);
      } else if (a > tol) {
        ok = false;
      }
    }
    if (hits != 1) ok = false;
  }
  for (int h : col_hits)
    if (h != 1) ok = false;
  out.monomial = ok;
  return out;
}

/// Stacks the Bob-blocks of subspace vectors as columns: vector b of length dimA*n contributes
/// block g_{j,b} = v_b[j*n .. j*n+n) at column j*k + b, where k is the number of vectors.
inline CMatrix gram_frame(const std::vector<CVector>& vectors, int dim_a) {
  if (vectors.empty()) throw StructuralError("need at least one vector");
  const auto len = vectors.front().size();
  if (dim_a <= 0 || len % dim_a != 0 || len == 0) throw StructuralError("vector length not divisible by dimA");
  const auto n = len / dim_a;
  const auto k = static_cast<Eigen::Index>(vectors.size());
  CMatrix g(n, dim_a * k);
  for (Eigen::Index b = 0; b < k; ++b) {
    if (vectors[b].size() != len) throw StructuralError("vectors have inconsistent lengths");
    for (Eigen::Index j = 0; j < dim_a; ++j) g.col(j * k + b) = vectors[b].segment(j * n, n);
  }
  return g;
}

/// Gram operator with (M_jk)_ab = <g_{j,a} | g_{k,b}>, an operator on C^dimA (x) C^k.
inline BipartiteOperator gram_operator(const std::vector<CVector>& vectors, int dim_a = 3) {
  const CMatrix g = gram_frame(vectors, dim_a);
  return {dim_a, static_cast<int>(vectors.size()), g.adjoint() * g};
}

inline double min_eigenvalue(const CMatrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("eigenvalues need a square matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline RVector eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Hermitian PSD square root (negative eigenvalues clipped to zero).
inline CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0);
  const RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Isometric real coordinates of a Hermitian matrix: diagonal entries, then sqrt(2) Re and
/// sqrt(2) Im of each strictly-upper entry.
inline RVector hermitian_to_real(const CMatrix& h) {
  const auto n = h.rows();
  RVector out(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(k++) = h(i, i).real();
  const double s = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(k++) = s * h(i, j).real();
      out(k++) = s * h(i, j).imag();
    }
  return out;
}

inline CMatrix real_to_hermitian(const RVector& x, Eigen::Index n) {
  if (x.size() != n * n) throw StructuralError("coordinate vector has wrong length");
  CMatrix h = CMatrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = x(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      h(i, j) = Complex(s * x(k), s * x(k + 1));
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  return h;
}

/// Isometric coordinates of a real symmetric matrix: diagonal, then sqrt(2) * upper entries.
inline RVector symmetric_to_real(const RMatrix& h) {
  const auto n = h.rows();
  RVector out(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(k++) = h(i, i);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = std::sqrt(2.0) * h(i, j);
  return out;
}

inline RMatrix real_to_symmetric(const RVector& x, Eigen::Index n) {
  if (x.size() != n * (n + 1) / 2) throw StructuralError("coordinate vector has wrong length");
  RMatrix h = RMatrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = x(k++);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) h(i, j) = h(j, i) = x(k++) / std::sqrt(2.0);
  return h;
}

/// Orthonormal basis (columns) of the null space of a real constraint matrix.
inline RMatrix null_space(const RMatrix& constraints, double rel_tol = 1e-10) {
  const auto n = constraints.cols();
  if (constraints.rows() == 0) return RMatrix::Identity(n, n);
  Eigen::JacobiSVD<RMatrix> svd(constraints, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace ddlocc
