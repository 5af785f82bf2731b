// Small fixed-size vector/matrix value types used throughout the library.
// Real 3-vectors carry geometry; complex 3-vectors and 3x3 matrices carry
// wave fields and Green tensors. Everything is a plain aggregate.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace ersi {

using Complex = std::complex<double>;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](std::size_t i) { return (&x)[i]; }
  double operator[](std::size_t i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2_sq(const Vec3& v) { return dot(v, v); }
inline double norm2(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm2(v);
  return {v.x / n, v.y / n, v.z / n};
}

struct CVec3 {
  Complex x{}, y{}, z{};

  Complex& operator[](std::size_t i) { return (&x)[i]; }
  const Complex& operator[](std::size_t i) const { return (&x)[i]; }

  CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  CVec3 operator-(const CVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  CVec3 operator*(const Complex& s) const { return {x * s, y * s, z * s}; }
};

inline CVec3 operator*(const Complex& s, const CVec3& v) { return v * s; }

// Bilinear dot product, no conjugation. The integral identities this library
// implements pair fields bilinearly, so this is the default pairing.
inline Complex dot(const CVec3& a, const CVec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Complex dot(const Vec3& a, const CVec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm2(const CVec3& v) {
  return std::sqrt(std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
}

// Row-major 3x3 matrices.
template <class T>
struct Mat3T {
  std::array<T, 9> a{};

  T& operator()(std::size_t r, std::size_t c) { return a[3 * r + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a[3 * r + c]; }

  static Mat3T identity() {
    Mat3T m;
    m(0, 0) = m(1, 1) = m(2, 2) = T(1);
    return m;
  }
};

using Mat3 = Mat3T<double>;
using CMat3 = Mat3T<Complex>;

inline CVec3 matvec(const CMat3& m, const Vec3& v) {
  CVec3 r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = m(i, 0) * v.x + m(i, 1) * v.y + m(i, 2) * v.z;
  return r;
}

inline CVec3 matvec(const CMat3& m, const CVec3& v) {
  CVec3 r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = m(i, 0) * v.x + m(i, 1) * v.y + m(i, 2) * v.z;
  return r;
}

inline Vec3 matvec(const Mat3& m, const Vec3& v) {
  Vec3 r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = m(i, 0) * v.x + m(i, 1) * v.y + m(i, 2) * v.z;
  return r;
}

inline CVec3 matvec(const Mat3& m, const CVec3& v) {
  CVec3 r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = m(i, 0) * v.x + m(i, 1) * v.y + m(i, 2) * v.z;
  return r;
}

struct Box3 {
  Vec3 lo, hi;

  Vec3 side() const { return hi - lo; }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }
};

inline bool is_finite(const Complex& c) {
  return std::isfinite(c.real()) && std::isfinite(c.imag());
}

inline bool is_finite(const CVec3& v) {
  return is_finite(v.x) && is_finite(v.y) && is_finite(v.z);
}

inline bool is_finite(const CMat3& m) {
  for (const auto& e : m.a)
    if (!is_finite(e)) return false;
  return true;
}

}  // namespace ersi
