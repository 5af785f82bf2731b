// Dense 3x3 linear algebra: direct solve with partial pivoting, and
// singular values via a cyclic Jacobi eigensolver on A^T A. Small enough
// that everything runs to machine precision deterministically.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "ersi/errors.hpp"
#include "ersi/vec.hpp"

namespace ersi {

// Solves A x = b for real A and complex b by Gaussian elimination with
// partial pivoting. Throws NumericalError on a (numerically) singular pivot.
inline CVec3 solve3(const Mat3& a_in, const CVec3& b_in) {
  std::array<std::array<double, 3>, 3> a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[r][c] = a_in(r, c);
  std::array<Complex, 3> b = {b_in.x, b_in.y, b_in.z};

  double scale = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(a[r][c]));
  if (scale == 0.0) throw NumericalError("solve3: zero matrix");

  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300 * scale)
      throw NumericalError("solve3: singular matrix");
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }

  CVec3 x;
  for (int r = 2; r >= 0; --r) {
    Complex s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations,
// returned in descending order.
inline std::array<double, 3> sym3_eigenvalues(Mat3 s) {
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(s(0, 1)) + std::abs(s(0, 2)) + std::abs(s(1, 2));
    if (off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        const double app = s(p, p), aqq = s(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        // Apply rotation on both sides.
        Mat3 r = Mat3::identity();
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = sn;
        r(q, p) = -sn;
        Mat3 tmp{};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += r(k, i) * s(k, j);
            tmp(i, j) = acc;
          }
        Mat3 out{};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += tmp(i, k) * r(k, j);
            out(i, j) = acc;
          }
        s = out;
      }
    }
  }
  std::array<double, 3> ev = {s(0, 0), s(1, 1), s(2, 2)};
  std::sort(ev.begin(), ev.end(), std::greater<double>());
  return ev;
}

// Singular values of a real 3x3 matrix, descending.
inline std::array<double, 3> singular_values3(const Mat3& a) {
  Mat3 ata{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += a(k, i) * a(k, j);
      ata(i, j) = acc;
    }
  auto ev = sym3_eigenvalues(ata);
  return {std::sqrt(std::max(ev[0], 0.0)), std::sqrt(std::max(ev[1], 0.0)),
          std::sqrt(std::max(ev[2], 0.0))};
}

// Spectral norm.
inline double norm2_3x3(const Mat3& a) { return singular_values3(a)[0]; }

// 2-norm condition number; infinity when the smallest singular value
// underflows to zero.
inline double cond2_3x3(const Mat3& a) {
  const auto sv = singular_values3(a);
  if (sv[2] <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / sv[2];
}

}  // namespace ersi
