#pragma once

// Central-difference Jacobians with their singular-value spectra, for numerical rank
// and determinant certificates.

#include <Eigen/Dense>

#include <algorithm>

#include "ddlocc/errors.hpp"
#include "ddlocc/linalg.hpp"

namespace ddlocc {

struct JacobianResult {
  RMatrix jacobian;
  RVector singular_values;  // descending

  /// Singular values divided by the largest one.
  RVector normalized() const {
    if (singular_values.size() == 0 || singular_values(0) == 0.0) return singular_values;
    return singular_values / singular_values(0);
  }

  /// Number of normalized singular values above `threshold`.
  int rank(double threshold = 1e-6) const {
    const RVector s = normalized();
    return static_cast<int>((s.array() > threshold).count());
  }
};

/// J(:, i) = (f(x + h e_i) - f(x - h e_i)) / 2h. Exceptions thrown by f propagate.
template <class F>
JacobianResult finite_diff_jacobian(F&& f, const RVector& x, double step = 1e-5) {
  if (!(step > 0.0)) throw PreconditionError("finite-difference step must be positive");
  const RVector f0 = f(x);
  RMatrix jac(f0.size(), x.size());
  RVector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + step;
    xm(i) = x(i) - step;
    const RVector fp = f(xp), fm = f(xm);
    if (fp.size() != f0.size() || fm.size() != f0.size()) throw StructuralError("f changed output size");
    jac.col(i) = (fp - fm) / (2.0 * step);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  Eigen::JacobiSVD<RMatrix> svd(jac);
  return {std::move(jac), svd.singularValues()};
}

}  // namespace ddlocc
