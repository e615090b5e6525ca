#pragma once

// Simultaneous unitary (or orthogonal) diagonalization of Hermitian matrices by Jacobi
// rotations (Cardoso-Souloumiac angles), seeded with the eigenbasis of a generic linear
// combination so that exactly commuting inputs are diagonalized in one step.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ddlocc/lie_groups.hpp"
#include "ddlocc/linalg.hpp"

namespace ddlocc {

struct JointDiagResult {
  CMatrix v;               // special unitary with v * A_i * v^dagger (nearly) diagonal
  double off_residual = 0.0;  // sqrt(sum_i ||offdiag(v A_i v^dagger)||_F^2)
  int sweeps = 0;
};

inline double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

/// `real` restricts every rotation to SO(k); inputs must then be real symmetric.
inline JointDiagResult joint_diagonalize(const std::vector<CMatrix>& mats, bool real = false,
                                         double tol = 1e-15, int max_sweeps = 100) {
  if (mats.empty()) throw StructuralError("joint_diagonalize needs at least one matrix");
  const auto k = mats.front().rows();
  for (const auto& a : mats)
    if (a.rows() != k || a.cols() != k) throw StructuralError("joint_diagonalize needs equal square matrices");

  std::vector<CMatrix> work;
  work.reserve(mats.size());
  for (const auto& a : mats) work.push_back((a + a.adjoint()) / 2.0);

  // Generic combination; irrational weights avoid accidental degeneracy.
  CMatrix comb = CMatrix::Zero(k, k);
  for (std::size_t i = 0; i < work.size(); ++i) comb += work[i] / (1.0 + std::sqrt(2.0 + i) * i);
  CMatrix w;
  if (real) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(comb.real());
    w = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(comb);
    w = es.eigenvectors();
  }
  for (auto& a : work) a = w.adjoint() * a * w;

  double scale = 0.0;
  for (const auto& a : work) scale += a.squaredNorm();
  const double threshold = tol * std::max(scale, 1e-300);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < k; ++p)
      for (Eigen::Index q = p + 1; q < k; ++q) {
        Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
        for (const auto& a : work) {
          const Eigen::Vector3cd h(a(p, p) - a(q, q), a(p, q) + a(q, p),
                                   Complex(0, 1) * (a(q, p) - a(p, q)));
          g += (h * h.adjoint()).real();
        }
        if (real) {
          g.row(2).setZero();
          g.col(2).setZero();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
        Eigen::Vector3d ang = es.eigenvectors().col(2);
        if (ang(0) < 0) ang = -ang;
        const double c = std::sqrt(0.5 + ang(0) / 2.0);
        if (c == 0.0) continue;
        const Complex s = 0.5 * Complex(ang(1), -ang(2)) / c;
        if (std::norm(s) <= 1e-32) continue;
        // Skip rotations that would not lower the off-diagonal mass.
        double before = 0.0;
        for (const auto& a : work) before += std::norm(a(p, q)) + std::norm(a(q, p));
        if (before <= threshold) continue;
        CMatrix r = CMatrix::Identity(k, k);
        r(p, p) = c;
        r(p, q) = -std::conj(s);
        r(q, p) = s;
        r(q, q) = c;
        double after = 0.0;
        std::vector<CMatrix> next;
        next.reserve(work.size());
        for (const auto& a : work) {
          next.push_back(r.adjoint() * a * r);
          after += std::norm(next.back()(p, q)) + std::norm(next.back()(q, p));
        }
        if (after >= before) continue;
        work = std::move(next);
        w = w * r;
        rotated = true;
      }
    if (!rotated) break;
  }

  // Canonical ordering: lexicographic on the diagonals of the first two matrices.
  std::vector<Eigen::Index> order(k);
  std::iota(order.begin(), order.end(), 0);
  const double tie = 1e-9 * std::sqrt(std::max(scale, 1e-300));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    for (std::size_t m = 0; m < std::min<std::size_t>(2, work.size()); ++m) {
      const double dx = work[m](x, x).real(), dy = work[m](y, y).real();
      if (std::abs(dx - dy) > tie) return dx < dy;
    }
    return false;
  });
  CMatrix sorted(k, k);
  for (Eigen::Index c = 0; c < k; ++c) sorted.col(c) = w.col(order[c]);
  w = sorted;

  // Phase normalization: first non-negligible entry of every column real positive.
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < k; ++r) {
      const double a = std::abs(w(r, c));
      if (a > 1e-8) {
        w.col(c) *= std::conj(w(r, c)) / a;
        break;
      }
    }
  if (real) {
    w = w.real().cast<Complex>();
    if (w.real().determinant() < 0) w.col(k - 1) *= -1.0;
  } else {
    w = remove_determinant_phase(w);
  }

  JointDiagResult out;
  out.v = w.adjoint();
  out.sweeps = sweep;
  double off = 0.0;
  for (const auto& a : mats) off += off_diagonal_norm2(out.v * a * out.v.adjoint());
  out.off_residual = std::sqrt(off);
  return out;
}

}  // namespace ddlocc
