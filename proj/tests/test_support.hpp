// Shared helpers for the unit tests: deterministic pseudo-random inputs and
// finite-difference oracles for the analytic derivatives.

#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "ersi/elastics.hpp"
#include "ersi/rng.hpp"
#include "ersi/vec.hpp"

namespace ersi::test {

inline double urand(std::uint32_t a, std::uint32_t b, std::uint32_t c = 0,
                    std::uint64_t seed = 20240901ull) {
  return uniform_pm1_draw(seed, RngStream::kTest, a, b, c);
}

inline Vec3 random_vec(std::uint32_t tag, std::uint32_t it, double scale = 1.0) {
  return Vec3{urand(tag, it, 0), urand(tag, it, 1), urand(tag, it, 2)} * scale;
}

inline Vec3 random_unit(std::uint32_t tag, std::uint32_t it) {
  Vec3 v = random_vec(tag, it);
  while (norm2(v) < 1e-3) v = random_vec(tag, it + 7919u);
  return normalized(v);
}

// Central-difference gradient of a complex scalar field.
inline CVec3 fd_gradient(const std::function<Complex(const Vec3&)>& f, const Vec3& x,
                         double step) {
  CVec3 g;
  for (std::size_t a = 0; a < 3; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    g[a] = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

// Central-difference Hessian of a complex scalar field.
inline CMat3 fd_hessian(const std::function<Complex(const Vec3&)>& f, const Vec3& x,
                        double step) {
  CMat3 h;
  const Complex f0 = f(x);
  for (std::size_t a = 0; a < 3; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    h(a, a) = (f(xp) - 2.0 * f0 + f(xm)) / (step * step);
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      Vec3 xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[a] += step;
      xpp[b] += step;
      xpm[a] += step;
      xpm[b] -= step;
      xmp[a] -= step;
      xmp[b] += step;
      xmm[a] -= step;
      xmm[b] -= step;
      h(a, b) = h(b, a) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * step * step);
    }
  return h;
}

// Traction operator D v = mu (grad v) nu + (lambda + mu)(div v) nu applied by
// central differences to a complex vector field.
inline CVec3 fd_traction(const std::function<CVec3(const Vec3&)>& field, const Vec3& x,
                         const Vec3& nu, const MaterialParams& p, double step) {
  CMat3 jac;  // jac(m, a) = d field_m / d x_a
  for (std::size_t a = 0; a < 3; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    const CVec3 fp = field(xp);
    const CVec3 fm = field(xm);
    for (std::size_t m = 0; m < 3; ++m) jac(m, a) = (fp[m] - fm[m]) / (2.0 * step);
  }
  const Complex div = jac(0, 0) + jac(1, 1) + jac(2, 2);
  CVec3 out;
  for (std::size_t m = 0; m < 3; ++m) {
    Complex dn{};
    for (std::size_t a = 0; a < 3; ++a) dn += jac(m, a) * nu[a];
    out[m] = p.mu() * dn + (p.lambda() + p.mu()) * div * nu[m];
  }
  return out;
}

inline double rel_diff(const Complex& a, const Complex& b, double floor_scale) {
  return std::abs(a - b) / std::max(floor_scale, std::max(std::abs(a), std::abs(b)));
}

}  // namespace ersi::test
