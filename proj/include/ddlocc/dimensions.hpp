#pragma once

// Real dimensions of the operator spaces M0, M00, D00 (complex) and M2, D2 (real), computed as
// null spaces of explicit linear constraint systems in isometric coordinates.

#include <Eigen/Dense>

#include <functional>

#include "ddlocc/linalg.hpp"

namespace ddlocc {

namespace detail {

/// Stacks the images of every coordinate basis vector under `constraints` and returns an
/// orthonormal basis of the common kernel.
inline RMatrix kernel_basis(Eigen::Index coords, const std::function<RVector(const RVector&)>& constraints) {
  RVector probe = RVector::Zero(coords);
  const Eigen::Index rows = constraints(probe).size();
  RMatrix c(rows, coords);
  for (Eigen::Index i = 0; i < coords; ++i) {
    probe.setZero();
    probe(i) = 1.0;
    c.col(i) = constraints(probe);
  }
  return null_space(c);
}

inline RVector concat(std::initializer_list<RVector> parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  RVector out(n);
  n = 0;
  for (const auto& p : parts) {
    out.segment(n, p.size()) = p;
    n += p.size();
  }
  return out;
}

inline RVector diag_block_offdiag(const CMatrix& h, int dim_b, int blocks) {
  RVector out(2 * blocks * dim_b * dim_b);
  Eigen::Index k = 0;
  for (int j = 0; j < blocks; ++j) {
    CMatrix d = h.block(j * dim_b, j * dim_b, dim_b, dim_b);
    d.diagonal().setZero();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      out(k++) = d(i).real();
      out(k++) = d(i).imag();
    }
  }
  return out;
}

}  // namespace detail

/// Kernel bases; columns are in hermitian_to_real (complex) or symmetric_to_real (real)
/// coordinates.
struct ComplexSpaces {
  RMatrix m0, m00, d00;
};

struct RealSpaces {
  RMatrix m2, d2;
};

struct ComplexDims {
  int m0 = 0;   // Hermitian, M_B = 0
  int m00 = 0;  // additionally M_A = 0
  int d00 = 0;  // dd-matrices inside M00
};

struct RealDims {
  int m2 = 0;  // real symmetric, all blocks symmetric, M_A = M_B = 0
  int d2 = 0;  // dd-matrices inside M2
};

inline ComplexSpaces complex_spaces(int dim_a, int dim_b) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  auto margs = [=](const RVector& x) {
    return marginals(BipartiteOperator(dim_a, dim_b, real_to_hermitian(x, n)));
  };
  ComplexSpaces d;
  d.m0 = detail::kernel_basis(n * n, [&](const RVector& x) { return hermitian_to_real(margs(x).b); });
  d.m00 = detail::kernel_basis(n * n, [&](const RVector& x) {
    const Marginals m = margs(x);
    return detail::concat({hermitian_to_real(m.b), hermitian_to_real(m.a)});
  });
  // Within M00 the last diagonal block is fixed by the others through M_B = 0, but the
  // constraint system lists all of them; the kernel dimension is unaffected.
  d.d00 = detail::kernel_basis(n * n, [&](const RVector& x) {
    const Marginals m = margs(x);
    return detail::concat({hermitian_to_real(m.b), hermitian_to_real(m.a),
                           detail::diag_block_offdiag(real_to_hermitian(x, n), dim_b, dim_a)});
  });
  return d;
}

/// Coordinates of real symmetric matrices; membership in M2 (blocks symmetric) is a constraint.
inline RealSpaces real_spaces(int dim_a, int dim_b) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  const Eigen::Index coords = n * (n + 1) / 2;
  auto base = [=](const RVector& x) {
    const RMatrix h = real_to_symmetric(x, n);
    RVector blocks_sym(static_cast<Eigen::Index>(dim_a) * dim_a * dim_b * dim_b);
    Eigen::Index k = 0;
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j) {
        const RMatrix b = h.block(i * dim_b, j * dim_b, dim_b, dim_b);
        const RMatrix skew = b - b.transpose();
        for (Eigen::Index e = 0; e < skew.size(); ++e) blocks_sym(k++) = skew(e);
      }
    const Marginals m = marginals(BipartiteOperator(dim_a, dim_b, h.cast<Complex>()));
    return detail::concat({blocks_sym, symmetric_to_real(m.a.real()), symmetric_to_real(m.b.real())});
  };
  RealSpaces d;
  d.m2 = detail::kernel_basis(coords, base);
  d.d2 = detail::kernel_basis(coords, [&](const RVector& x) {
    const CMatrix h = real_to_symmetric(x, n).cast<Complex>();
    return detail::concat({base(x), detail::diag_block_offdiag(h, dim_b, dim_a)});
  });
  return d;
}

inline ComplexDims complex_dimensions(int dim_a, int dim_b) {
  const ComplexSpaces s = complex_spaces(dim_a, dim_b);
  return {static_cast<int>(s.m0.cols()), static_cast<int>(s.m00.cols()), static_cast<int>(s.d00.cols())};
}

inline RealDims real_dimensions(int dim_a, int dim_b) {
  const RealSpaces s = real_spaces(dim_a, dim_b);
  return {static_cast<int>(s.m2.cols()), static_cast<int>(s.d2.cols())};
}

inline int su_dimension(int k) { return k * k - 1; }
inline int so_dimension(int k) { return k * (k - 1) / 2; }

}  // namespace ddlocc
