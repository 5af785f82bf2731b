// Closed-form elastic wave mathematics: Helmholtz fundamental solution and
// its radial derivatives, the Navier Green tensor, the traction operator
// applied to Green-tensor columns, and plane-wave probe fields.
//
// The Green tensor of the homogeneous isotropic Navier operator is
//
//     G(x,y) = (1/mu) g(r; ks) I + (1/kappa^2) Hess_x [ g(r; ks) - g(r; kp) ],
//
// with r = |x-y| and g(r; k) = -exp(i k r) / (4 pi r). Because g is radial,
// the Hessian reduces to  f''(r) rh rh^T + (f'(r)/r)(I - rh rh^T), so G is
//
//     G = cI(r) I + cRR(r) rh rh^T,        rh = (x-y)/r.
//
// The traction operator D u = mu d_nu u + (lambda+mu)(div u) nu applied to
// the columns of G needs one more radial derivative; everything up to g'''
// is written out analytically below. Finite differences live in the tests.

#pragma once

#include <cmath>
#include <complex>

#include "ersi/errors.hpp"
#include "ersi/material.hpp"
#include "ersi/vec.hpp"

namespace ersi {

// Evaluation closer to the source point than this is a usage error: the
// source grid never touches the observation sphere, so nothing legitimate
// gets near the singularity.
inline constexpr double kSingularRadius = 1e-14;

// g and its first three radial derivatives at radius r.
struct HelmholtzRadial {
  Complex g, g1, g2, g3;
};

inline HelmholtzRadial helmholtz_radial(double r, double kappa) {
  if (!(r > kSingularRadius))
    throw SingularPointError("helmholtz_radial: evaluation at the singular point");
  const Complex ikr(0.0, kappa * r);
  const Complex phase = std::exp(ikr);
  const double inv_4pi = 1.0 / (4.0 * M_PI);
  const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
  const double k = kappa, k2 = k * k, k3 = k2 * k;

  HelmholtzRadial h;
  h.g = -inv_4pi * phase / r;
  h.g1 = -inv_4pi * phase * (ikr - 1.0) / r2;
  h.g2 = -inv_4pi * phase * (Complex(2.0 - k2 * r2, -2.0 * k * r)) / r3;
  h.g3 = -inv_4pi * phase * (Complex(3.0 * k2 * r2 - 6.0, 6.0 * k * r - k3 * r3)) / r4;
  return h;
}

// Fundamental solution of the 3D Helmholtz equation, -e^{i kappa |x-y|} / (4 pi |x-y|).
inline Complex helmholtz_g(const Vec3& x, const Vec3& y, double kappa) {
  const double r = norm2(x - y);
  if (!(r > kSingularRadius))
    throw SingularPointError("helmholtz_g: evaluation at the singular point");
  const Complex phase = std::exp(Complex(0.0, kappa * r));
  return -phase / (4.0 * M_PI * r);
}

namespace elastics_detail {

// Radial coefficients of G = cI I + cRR rh rh^T and of its traction.
struct GreenRadial {
  Complex cI, cRR;    // Green tensor coefficients
  Complex cI1, cRR1;  // their radial derivatives
};

inline GreenRadial green_radial(double r, const MaterialParams& p) {
  const HelmholtzRadial s = helmholtz_radial(r, p.kappa_s());
  const HelmholtzRadial q = helmholtz_radial(r, p.kappa_p());
  const double inv_k2 = 1.0 / (p.kappa() * p.kappa());
  const Complex d1 = s.g1 - q.g1;
  const Complex d2 = s.g2 - q.g2;
  const Complex d3 = s.g3 - q.g3;

  GreenRadial g;
  g.cI = s.g / p.mu() + inv_k2 * d1 / r;
  g.cRR = inv_k2 * (d2 - d1 / r);
  g.cI1 = s.g1 / p.mu() + inv_k2 * (d2 / r - d1 / (r * r));
  g.cRR1 = inv_k2 * (d3 - d2 / r + d1 / (r * r));
  return g;
}

inline void green_from_radial(const GreenRadial& g, const Vec3& rh, CMat3& out) {
  const double rr[3] = {rh.x, rh.y, rh.z};
  for (int m = 0; m < 3; ++m)
    for (int j = 0; j < 3; ++j)
      out(m, j) = g.cRR * (rr[m] * rr[j]) + (m == j ? g.cI : Complex{});
}

inline void traction_from_radial(const GreenRadial& g, const Vec3& rh, double r,
                                 const Vec3& nu, const MaterialParams& p,
                                 CMat3& out) {
  const double s = dot(nu, rh);
  const double rr[3] = {rh.x, rh.y, rh.z};
  const double nn[3] = {nu.x, nu.y, nu.z};
  const Complex crr_r = g.cRR / r;
  const Complex div_coeff = (p.lambda() + p.mu()) * (g.cI1 + g.cRR1 + 2.0 * crr_r);
  const double mu = p.mu();
  for (int m = 0; m < 3; ++m) {
    for (int j = 0; j < 3; ++j) {
      Complex t = mu * (g.cRR1 * s * rr[m] * rr[j] +
                        crr_r * (nn[m] * rr[j] + rr[m] * nn[j] -
                                 2.0 * s * rr[m] * rr[j]));
      if (m == j) t += mu * g.cI1 * s;
      t += div_coeff * nn[m] * rr[j];
      out(m, j) = t;
    }
  }
}

}  // namespace elastics_detail

// Green tensor G(x, y) of the Navier equation.
inline CMat3 green_tensor(const Vec3& x, const Vec3& y, const MaterialParams& p) {
  const Vec3 d = x - y;
  const double r = norm2(d);
  if (!(r > kSingularRadius))
    throw SingularPointError("green_tensor: evaluation at the singular point");
  const auto g = elastics_detail::green_radial(r, p);
  CMat3 out;
  elastics_detail::green_from_radial(g, d / r, out);
  return out;
}

// Traction of the Green tensor: column j is D applied at x (normal nu) to
// the j-th column of G(., y).
inline CMat3 green_traction(const Vec3& x, const Vec3& y, const Vec3& normal,
                            const MaterialParams& p) {
  const Vec3 d = x - y;
  const double r = norm2(d);
  if (!(r > kSingularRadius))
    throw SingularPointError("green_traction: evaluation at the singular point");
  const auto g = elastics_detail::green_radial(r, p);
  CMat3 out;
  elastics_detail::traction_from_radial(g, d / r, r, normal, p, out);
  return out;
}

// Both tensors at once; shares the radial evaluation (the forward-simulation
// kernel calls this once per observation/cell pair).
inline void green_pair(const Vec3& x, const Vec3& y, const Vec3& normal,
                       const MaterialParams& p, CMat3& g_out, CMat3& t_out) {
  const Vec3 d = x - y;
  const double r = norm2(d);
  if (!(r > kSingularRadius))
    throw SingularPointError("green_pair: evaluation at the singular point");
  const auto g = elastics_detail::green_radial(r, p);
  const Vec3 rh = d / r;
  elastics_detail::green_from_radial(g, rh, g_out);
  elastics_detail::traction_from_radial(g, rh, r, normal, p, t_out);
}

// A plane-wave solution eta * exp(i zeta . x) of the homogeneous Navier
// equation: eta and zeta real, eta orthogonal to zeta, |zeta| = kappa_s,
// |eta| = 1. Validated at construction.
class PlaneWaveProbe {
 public:
  static constexpr double kTol = 1e-12;

  PlaneWaveProbe(const Vec3& eta, const Vec3& zeta, double kappa_s)
      : eta_(eta), zeta_(zeta) {
    if (std::abs(dot(eta, zeta)) > kTol * kappa_s)
      throw ValidationError("PlaneWaveProbe: eta not orthogonal to zeta");
    if (std::abs(norm2(zeta) - kappa_s) > kTol * kappa_s)
      throw ValidationError("PlaneWaveProbe: |zeta| != kappa_s");
    if (std::abs(norm2(eta) - 1.0) > kTol)
      throw ValidationError("PlaneWaveProbe: eta not a unit vector");
  }

  const Vec3& eta() const { return eta_; }
  const Vec3& zeta() const { return zeta_; }

 private:
  Vec3 eta_;
  Vec3 zeta_;
};

inline CVec3 probe_field(const PlaneWaveProbe& probe, const Vec3& x) {
  const Complex phase = std::exp(Complex(0.0, dot(probe.zeta(), x)));
  return {probe.eta().x * phase, probe.eta().y * phase, probe.eta().z * phase};
}

// D U for the plane-wave probe. The divergence term vanishes because
// eta . zeta = 0, leaving i mu (zeta . nu) eta exp(i zeta . x).
inline CVec3 probe_traction(const PlaneWaveProbe& probe, const Vec3& x,
                            const Vec3& normal, const MaterialParams& p) {
  const Complex factor =
      Complex(0.0, p.mu() * dot(probe.zeta(), normal)) *
      std::exp(Complex(0.0, dot(probe.zeta(), x)));
  return {probe.eta().x * factor, probe.eta().y * factor, probe.eta().z * factor};
}

}  // namespace ersi
