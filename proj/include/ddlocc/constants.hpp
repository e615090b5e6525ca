#pragma once

// Reference matrices: the unique-basis frame G, the regular point (U0, V0, H0) of the complex
// surjectivity argument, and the real regular point (X0, Y0, Z0).

#include <cmath>
#include <vector>

#include "ddlocc/linalg.hpp"

namespace ddlocc::constants {

/// 9x9 frame whose column groups (r1, r4, r7), (r2, r5, r8), (r3, r6, r9) are the Bob-blocks
/// of the unique locally distinguishable basis.
inline CMatrix frame_g() {
  const double s3 = std::sqrt(3.0), s2 = std::sqrt(2.0), s33 = std::sqrt(33.0), s11 = std::sqrt(11.0);
  const Complex i(0, 1);
  CMatrix g = CMatrix::Zero(9, 9);
  g(0, 0) = 2.0 / 3.0;
  g(1, 1) = 1.0 / s3;
  g(1, 5) = i / (3.0 * s3);
  g(1, 6) = 2.0 / (3.0 * s3);
  g(2, 2) = s2 / 3.0;
  g(3, 3) = 1.0 / s3;
  g(4, 4) = s2 / 3.0;
  g(5, 5) = s11 / (3.0 * s3);
  g(5, 6) = Complex(3, 2) / (3.0 * s33);
  g(6, 6) = 1.0 / s33;
  g(7, 7) = 2.0 / 3.0;
  g(8, 8) = 1.0 / s3;
  return g;
}

/// Psi_c = |1> (x) r_c + |2> (x) r_{c+3} + |3> (x) r_{c+6}, c = 0, 1, 2 (0-based columns).
inline std::vector<CVector> unique_basis() {
  const CMatrix g = frame_g();
  std::vector<CVector> out;
  for (int c = 0; c < 3; ++c) {
    CVector v(27);
    for (int j = 0; j < 3; ++j) v.segment(9 * j, 9) = g.col(3 * j + c);
    out.push_back(v);
  }
  return out;
}

inline CMatrix h0() {
  const Complex i(0, 1);
  CMatrix h = CMatrix::Zero(9, 9);
  h(0, 0) = 1;
  h(1, 5) = i;
  h(1, 6) = 2;
  h(2, 2) = -1;
  h(4, 4) = -1;
  h(5, 1) = -i;
  h(5, 5) = 1;
  h(5, 6) = 1;
  h(6, 1) = 2;
  h(6, 5) = 1;
  h(6, 6) = -1;
  h(7, 7) = 1;
  return h;
}

inline BipartiteOperator h0_operator() { return {3, 3, h0()}; }

/// U0 = V0.
inline CMatrix u0() {
  const double s3 = std::sqrt(3.0);
  CMatrix u(3, 3);
  u << 6, 4, 2 * s3,  //
      -1, 6, -3 * s3,  //
      -3 * s3, 2 * s3, 5;
  return u / 8.0;
}

inline CMatrix v0() { return u0(); }

/// X0 = Y0.
inline RMatrix x0() {
  RMatrix x(3, 3);
  x << 1, 0, 0,  //
      0, 0, -1,  //
      0, 1, 0;
  return x;
}

inline RMatrix y0() { return x0(); }

inline RMatrix z0() {
  RMatrix z(9, 9);
  z << 0, 0, 0, 0, 0, 1, 0, 0, 0,  //
      0, 1, 0, 0, 0, 0, 0, 0, 1,   //
      0, 0, -1, 1, 0, 0, 0, 1, 0,  //
      0, 0, 1, 0, 0, 0, 0, 1, 0,   //
      0, 0, 0, 0, 1, 0, 1, 0, 0,   //
      1, 0, 0, 0, 0, -1, 0, 0, 0,  //
      0, 0, 0, 0, 1, 0, 0, 0, 0,   //
      0, 0, 1, 1, 0, 0, 0, -2, 0,  //
      0, 1, 0, 0, 0, 0, 0, 0, 2;
  return z;
}

inline RealSymmetricOperator z0_operator() { return {3, 3, z0()}; }

}  // namespace ddlocc::constants
