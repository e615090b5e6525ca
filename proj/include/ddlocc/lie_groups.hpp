#pragma once

// Coordinate charts, Haar sampling and monomial subgroups of SU(3) and SO(3).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "ddlocc/errors.hpp"
#include "ddlocc/linalg.hpp"

namespace ddlocc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kAngleSlack = 1e-12;

/// Eight-angle chart of SU(3): 0 <= theta_i <= pi/2, 0 <= phi_i <= 2 pi.
struct SU3Angles {
  std::array<double, 3> theta{};
  std::array<double, 5> phi{};

  /// phi1 + phi2 - phi3 + phi4 + phi5, the phase combination that governs the first commutator entry.
  double psi() const { return phi[0] + phi[1] - phi[2] + phi[3] + phi[4]; }

  bool in_range() const {
    for (double t : theta)
      if (t < -kAngleSlack || t > kPi / 2 + kAngleSlack) return false;
    for (double p : phi)
      if (p < -kAngleSlack || p > 2 * kPi + kAngleSlack) return false;
    return true;
  }

  static SU3Angles from_vector(const RVector& x) {
    SU3Angles a;
    for (int i = 0; i < 3; ++i) a.theta[i] = x(i);
    for (int i = 0; i < 5; ++i) a.phi[i] = x(3 + i);
    return a;
  }
  RVector to_vector() const {
    RVector x(8);
    for (int i = 0; i < 3; ++i) x(i) = theta[i];
    for (int i = 0; i < 5; ++i) x(3 + i) = phi[i];
    return x;
  }
};

/// Z-X-Z style Euler angles of SO(3): alpha, gamma in [0, 2 pi], beta in [0, pi].
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  bool in_range() const {
    return alpha >= -kAngleSlack && alpha <= 2 * kPi + kAngleSlack && gamma >= -kAngleSlack &&
           gamma <= 2 * kPi + kAngleSlack && beta >= -kAngleSlack && beta <= kPi + kAngleSlack;
  }
};

/// Chart evaluation without range checks; used for local charts around interior points.
inline CMatrix su3_chart(const SU3Angles& a) {
  const double c1 = std::cos(a.theta[0]), c2 = std::cos(a.theta[1]), c3 = std::cos(a.theta[2]);
  const double s1 = std::sin(a.theta[0]), s2 = std::sin(a.theta[1]), s3 = std::sin(a.theta[2]);
  const auto [p1, p2, p3, p4, p5] = a.phi;
  auto e = [](double x) { return std::polar(1.0, x); };
  CMatrix u(3, 3);
  u(0, 0) = c1 * c2 * e(p1);
  u(0, 1) = s1 * e(p3);
  u(0, 2) = c1 * s2 * e(p4);
  u(1, 0) = s2 * s3 * e(-p4 - p5) - s1 * c2 * c3 * e(p1 + p2 - p3);
  u(1, 1) = c1 * c3 * e(p2);
  u(1, 2) = -c2 * s3 * e(-p1 - p5) - s1 * s2 * c3 * e(p2 - p3 + p4);
  u(2, 0) = -s1 * c2 * s3 * e(p1 - p3 + p5) - s2 * c3 * e(-p2 - p4);
  u(2, 1) = c1 * s3 * e(p5);
  u(2, 2) = c2 * c3 * e(-p1 - p2) - s1 * s2 * s3 * e(-p3 + p4 + p5);
  return u;
}

inline CMatrix su3_from_angles(const SU3Angles& a) {
  if (!a.in_range()) throw PreconditionError("SU(3) angles out of range");
  return su3_chart(a);
}

inline RMatrix so3_chart(const EulerAngles& e) {
  const double ca = std::cos(e.alpha), sa = std::sin(e.alpha);
  const double cb = std::cos(e.beta), sb = std::sin(e.beta);
  const double cg = std::cos(e.gamma), sg = std::sin(e.gamma);
  RMatrix x(3, 3);
  x << ca * cg - sa * cb * sg, -ca * sg - sa * cb * cg, sa * sb,  //
      sa * cg + ca * cb * sg, -sa * sg + ca * cb * cg, -ca * sb,  //
      sb * sg, sb * cg, cb;
  return x;
}

inline RMatrix so3_from_euler(const EulerAngles& e) {
  if (!e.in_range()) throw PreconditionError("Euler angles out of range");
  return so3_chart(e);
}

// ---------------------------------------------------------------------------
// Seeding. Every random stream is derived from (seed, stream id) through std::seed_seq so
// that independent starts/samples never share a generator.

inline std::uint64_t stream_id(std::string_view purpose) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

inline CMatrix gaussian_cmatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = n01(rng);
      const double im = n01(rng);
      g(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  return g;
}

inline RMatrix gaussian_rmatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  RMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = n01(rng);
  return g;
}

/// Multiplies by det^{-1/k} so the result has determinant one.
inline CMatrix remove_determinant_phase(const CMatrix& u) {
  const Complex det = u.determinant();
  const Complex root = std::pow(det, 1.0 / static_cast<double>(u.rows()));
  return u / root;
}

/// Haar-random isometry with the given shape (rows >= cols), via QR of a Gaussian matrix.
inline CMatrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  if (rows < cols) throw StructuralError("isometry needs rows >= cols");
  const CMatrix g = gaussian_cmatrix(rows, cols, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  const CMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  CVector phases(cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double a = std::abs(r(i, i));
    phases(i) = a > 0 ? r(i, i) / a : Complex(1.0);
  }
  return q * phases.asDiagonal();
}

inline CMatrix random_unitary(int k, std::mt19937_64& rng) { return random_isometry(k, k, rng); }

inline CMatrix random_special_unitary(int k, std::mt19937_64& rng) {
  return remove_determinant_phase(random_unitary(k, rng));
}

inline CMatrix random_special_unitary(int k, std::uint64_t seed) {
  auto rng = make_rng(seed, stream_id("special-unitary"));
  return random_special_unitary(k, rng);
}

inline RMatrix random_special_orthogonal(int k, std::mt19937_64& rng) {
  const RMatrix g = gaussian_rmatrix(k, k, rng);
  Eigen::HouseholderQR<RMatrix> qr(g);
  RMatrix q = qr.householderQ();
  const RMatrix r = qr.matrixQR();
  for (int i = 0; i < k; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

inline RMatrix random_special_orthogonal(int k, std::uint64_t seed) {
  auto rng = make_rng(seed, stream_id("special-orthogonal"));
  return random_special_orthogonal(k, rng);
}

/// Closest unitary (polar factor) with its determinant phase removed.
inline CMatrix project_special_unitary(const CMatrix& u) {
  Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return remove_determinant_phase(svd.matrixU() * svd.matrixV().adjoint());
}

inline RMatrix project_special_orthogonal(const RMatrix& x) {
  Eigen::JacobiSVD<RMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  RMatrix q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0) {
    RMatrix u = svd.matrixU();
    u.col(u.cols() - 1) *= -1.0;
    q = u * svd.matrixV().transpose();
  }
  return q;
}

// ---------------------------------------------------------------------------
// Lie algebras and the exponential retraction.

/// Basis of su(k): real antisymmetric E_pq - E_qp, imaginary symmetric i(E_pq + E_qp), and
/// traceless diagonals i(E_pp - E_{p+1,p+1}).
inline std::vector<CMatrix> su_basis(int k) {
  std::vector<CMatrix> out;
  for (int p = 0; p < k; ++p)
    for (int q = p + 1; q < k; ++q) {
      CMatrix a = CMatrix::Zero(k, k);
      a(p, q) = 1.0;
      a(q, p) = -1.0;
      out.push_back(a);
      CMatrix s = CMatrix::Zero(k, k);
      s(p, q) = Complex(0, 1);
      s(q, p) = Complex(0, 1);
      out.push_back(s);
    }
  for (int p = 0; p + 1 < k; ++p) {
    CMatrix d = CMatrix::Zero(k, k);
    d(p, p) = Complex(0, 1);
    d(p + 1, p + 1) = Complex(0, -1);
    out.push_back(d);
  }
  return out;
}

/// Basis of so(k): E_pq - E_qp.
inline std::vector<CMatrix> so_basis(int k) {
  std::vector<CMatrix> out;
  for (int p = 0; p < k; ++p)
    for (int q = p + 1; q < k; ++q) {
      CMatrix a = CMatrix::Zero(k, k);
      a(p, q) = 1.0;
      a(q, p) = -1.0;
      out.push_back(a);
    }
  return out;
}

/// exp(X) for anti-Hermitian X, computed through the spectral decomposition of iX.
inline CMatrix expm_skew(const CMatrix& x) {
  const CMatrix h = Complex(0, 1) * x;
  Eigen::SelfAdjointEigenSolver<CMatrix> es((h + h.adjoint()) / 2.0);
  CVector phases(h.rows());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Monomial subgroups.

/// The 24 signed permutation matrices with determinant one (monomial part of SO(3)).
inline std::vector<RMatrix> s4_enumerate() {
  std::vector<RMatrix> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int signs = 0; signs < 8; ++signs) {
      RMatrix m = RMatrix::Zero(3, 3);
      for (int r = 0; r < 3; ++r) m(r, perm[r]) = (signs >> r) & 1 ? -1.0 : 1.0;
      if (m.determinant() > 0) out.push_back(m);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

struct NearestMonomial {
  CMatrix monomial;
  double distance = 0.0;
};

/// Nearest element of the monomial subgroup of SU(3) in Frobenius norm. For each of the six
/// permutation patterns the phases solve min sum_i w_i (1 - cos d_i) subject to the determinant
/// constraint; the 2-d reduced problem is solved by a coarse grid followed by Newton steps.
inline NearestMonomial nearest_monomial(const CMatrix& u) {
  if (u.rows() != 3 || u.cols() != 3) throw StructuralError("nearest_monomial is defined for order 3");
  NearestMonomial best{CMatrix::Identity(3, 3), std::numeric_limits<double>::infinity()};
  std::array<int, 3> perm{0, 1, 2};
  do {
    // Sign of the permutation.
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (perm[i] > perm[j]) ++inversions;
    const double sign_phase = (inversions % 2) ? kPi : 0.0;
    std::array<double, 3> w{}, arg{};
    for (int r = 0; r < 3; ++r) {
      w[r] = std::abs(u(r, perm[r]));
      arg[r] = std::arg(u(r, perm[r]));
    }
    // gamma(r, perm r) = exp(i (arg_r - d_r)); det = exp(i (sign_phase + sum arg - sum d)) = 1.
    const double total = sign_phase + arg[0] + arg[1] + arg[2];
    auto cost = [&](double d0, double d1) {
      const double d2 = total - d0 - d1;
      return w[0] * (1 - std::cos(d0)) + w[1] * (1 - std::cos(d1)) + w[2] * (1 - std::cos(d2));
    };
    double b0 = 0, b1 = 0, bc = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 48;
    for (int i = 0; i < kGrid; ++i)
      for (int j = 0; j < kGrid; ++j) {
        const double d0 = -kPi + 2 * kPi * i / kGrid, d1 = -kPi + 2 * kPi * j / kGrid;
        const double c = cost(d0, d1);
        if (c < bc) {
          bc = c;
          b0 = d0;
          b1 = d1;
        }
      }
    for (int it = 0; it < 50; ++it) {
      const double d2 = total - b0 - b1;
      const double g0 = w[0] * std::sin(b0) - w[2] * std::sin(d2);
      const double g1 = w[1] * std::sin(b1) - w[2] * std::sin(d2);
      const double h2 = w[2] * std::cos(d2);
      Eigen::Matrix2d hess;
      hess << w[0] * std::cos(b0) + h2, h2, h2, w[1] * std::cos(b1) + h2;
      Eigen::Vector2d step = -hess.ldlt().solve(Eigen::Vector2d(g0, g1));
      if (!step.allFinite() || cost(b0 + step(0), b1 + step(1)) > cost(b0, b1)) {
        step = -0.1 * Eigen::Vector2d(g0, g1);
        if (cost(b0 + step(0), b1 + step(1)) > cost(b0, b1)) break;
      }
      b0 += step(0);
      b1 += step(1);
      if (step.norm() < 1e-15) break;
    }
    const std::array<double, 3> d{b0, b1, total - b0 - b1};
    CMatrix g = CMatrix::Zero(3, 3);
    for (int r = 0; r < 3; ++r) g(r, perm[r]) = std::polar(1.0, arg[r] - d[r]);
    const double dist = (u - g).norm();
    if (dist < best.distance) best = {g, dist};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace ddlocc
