// Frequency-domain probe design. For a frequency point xi with |xi| < 2 ks,
// each pair of plane-wave probes takes the form
//
//     zeta_1 = xi/2 + sqrt(ks^2 - |xi|^2/4) alpha,
//     zeta_2 = xi/2 - sqrt(ks^2 - |xi|^2/4) alpha,     alpha . xi = 0, |alpha| = 1,
//
// so that zeta_1 + zeta_2 = xi and |zeta_l| = ks. The pair for axis k picks
// alpha with zero k-th component, which maximizes the k-th diagonal entry of
// the coefficient matrix A_km = eta_1m eta_2m at the value 1 - xi_k^2/(4 ks^2).
// The k = 2, 3 constructions are cyclic coordinate permutations of k = 1.
//
// Degenerate directions (xi parallel to axis k, including xi = 0) admit a
// one-parameter family alpha = (0, sin theta, cos theta) in permuted slots;
// theta is a configuration knob fixed to 0 by default.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ersi/elastics.hpp"
#include "ersi/errors.hpp"
#include "ersi/linalg3.hpp"
#include "ersi/material.hpp"
#include "ersi/observation.hpp"
#include "ersi/rng.hpp"
#include "ersi/vec.hpp"

namespace ersi {

// Two probes sharing xi = zeta1 + zeta2, built for one coordinate axis.
struct ProbePair {
  PlaneWaveProbe u1;
  PlaneWaveProbe u2;
  Vec3 xi;
  Vec3 alpha;
  int axis = 0;
};

struct ProbeTriple {
  std::array<ProbePair, 3> pairs;
  Mat3 coeff;        // A_km = eta_1m^(k) * eta_2m^(k), real by construction
  double cond = 0.0;  // 2-norm condition number of coeff
  double norm = 0.0;  // spectral norm of coeff
  bool flagged = false;  // cond above the configured ceiling
};

namespace probes_detail {

inline std::array<int, 3> cyclic_slots(int axis) {
  switch (axis) {
    case 0: return {0, 1, 2};
    case 1: return {1, 2, 0};
    default: return {2, 0, 1};
  }
}

// eta orthogonal to zeta with maximal component along the slot axis a:
//   eta_a = sqrt(1 - w_a^2),  eta_m = -w_a w_m / sqrt(1 - w_a^2)  (m != a),
// where w = zeta / ks.
inline Vec3 optimal_eta(const Vec3& zeta, double kappa_s, const std::array<int, 3>& s) {
  const Vec3 w = zeta / kappa_s;
  const double wa = w[static_cast<std::size_t>(s[0])];
  const double denom = std::sqrt(1.0 - wa * wa);
  Vec3 eta;
  eta[static_cast<std::size_t>(s[0])] = denom;
  eta[static_cast<std::size_t>(s[1])] = -wa * w[static_cast<std::size_t>(s[1])] / denom;
  eta[static_cast<std::size_t>(s[2])] = -wa * w[static_cast<std::size_t>(s[2])] / denom;
  return eta;
}

}  // namespace probes_detail

// Optimized probe pair for one axis (0-based). theta resolves the degenerate
// directions where xi has no component off the axis.
inline ProbePair design_pair(const Vec3& xi, int axis, const MaterialParams& p,
                             double theta = 0.0) {
  if (axis < 0 || axis > 2) throw ValidationError("design_pair: axis must be 0..2");
  const double ks = p.kappa_s();
  const double xi_norm = norm2(xi);
  if (!(xi_norm < 2.0 * ks))
    throw OutOfBandError("design_pair: |xi| = " + std::to_string(xi_norm) +
                         " is not below 2 kappa_s = " + std::to_string(2.0 * ks));

  const auto s = probes_detail::cyclic_slots(axis);
  const double xb = xi[static_cast<std::size_t>(s[1])];
  const double xc = xi[static_cast<std::size_t>(s[2])];
  const double off_axis = std::hypot(xb, xc);

  Vec3 alpha;
  if (off_axis > 0.0) {
    alpha[static_cast<std::size_t>(s[0])] = 0.0;
    alpha[static_cast<std::size_t>(s[1])] = -xc / off_axis;
    alpha[static_cast<std::size_t>(s[2])] = xb / off_axis;
  } else {
    alpha[static_cast<std::size_t>(s[0])] = 0.0;
    alpha[static_cast<std::size_t>(s[1])] = std::sin(theta);
    alpha[static_cast<std::size_t>(s[2])] = std::cos(theta);
  }

  const double half_sq = 0.25 * xi_norm * xi_norm;
  const double c = std::sqrt(ks * ks - half_sq);
  const Vec3 zeta1 = 0.5 * xi + c * alpha;
  const Vec3 zeta2 = 0.5 * xi - c * alpha;
  const Vec3 eta1 = probes_detail::optimal_eta(zeta1, ks, s);
  const Vec3 eta2 = probes_detail::optimal_eta(zeta2, ks, s);

  return ProbePair{PlaneWaveProbe(eta1, zeta1, ks), PlaneWaveProbe(eta2, zeta2, ks),
                   xi, alpha, axis};
}

// Three pairs (one per axis) and the assembled coefficient matrix with its
// conditioning diagnostics. Ill-conditioned points are flagged, not solved.
inline ProbeTriple design_triple(const Vec3& xi, const MaterialParams& p,
                                 double cond_ceiling = 1e3, double theta = 0.0) {
  ProbeTriple t{{design_pair(xi, 0, p, theta), design_pair(xi, 1, p, theta),
                 design_pair(xi, 2, p, theta)}};
  for (int k = 0; k < 3; ++k) {
    const Vec3& e1 = t.pairs[static_cast<std::size_t>(k)].u1.eta();
    const Vec3& e2 = t.pairs[static_cast<std::size_t>(k)].u2.eta();
    for (std::size_t m = 0; m < 3; ++m)
      t.coeff(static_cast<std::size_t>(k), m) = e1[m] * e2[m];
  }
  t.cond = cond2_3x3(t.coeff);
  t.norm = norm2_3x3(t.coeff);
  t.flagged = !(t.cond <= cond_ceiling);
  return t;
}

// --- Conditioning survey (two-construction comparison) ---------------------

struct SurveyRow {
  double radius = 0.0;
  std::string construction;  // "optimized" or "random"
  double mean = 0.0;
  double max = 0.0;
  double median = 0.0;
};

namespace probes_detail {

// Deterministic orthonormal pair spanning the plane orthogonal to v.
inline std::pair<Vec3, Vec3> orthogonal_basis(const Vec3& v) {
  const Vec3 vh = normalized(v);
  const double ax = std::abs(vh.x), ay = std::abs(vh.y), az = std::abs(vh.z);
  Vec3 seed_axis{1.0, 0.0, 0.0};
  if (ay <= ax && ay <= az)
    seed_axis = Vec3{0.0, 1.0, 0.0};
  else if (az <= ax && az <= ay)
    seed_axis = Vec3{0.0, 0.0, 1.0};
  const Vec3 e = normalized(cross(vh, seed_axis));
  const Vec3 f = cross(vh, e);
  return {e, f};
}

inline Vec3 random_unit_orthogonal(const Vec3& v, std::uint64_t seed,
                                   std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  const auto [e, f] = orthogonal_basis(v);
  const double phi = 2.0 * M_PI * uniform01_draw(seed, RngStream::kProbeSurvey, a, b, c);
  return std::cos(phi) * e + std::sin(phi) * f;
}

// Coefficient matrix of a randomly parameterized admissible triple: alpha
// uniform on the circle orthogonal to xi, each eta uniform on the circle
// orthogonal to its zeta.
inline Mat3 random_coeff_matrix(const Vec3& xi, const MaterialParams& p,
                                std::uint64_t seed, std::uint32_t dir_idx,
                                std::uint32_t radius_idx) {
  const double ks = p.kappa_s();
  const double c = std::sqrt(ks * ks - 0.25 * norm2_sq(xi));
  Mat3 a{};
  for (std::uint32_t k = 0; k < 3; ++k) {
    const std::uint32_t tag = radius_idx * 16u + k * 4u;
    const Vec3 alpha = random_unit_orthogonal(xi, seed, dir_idx, tag, 0u);
    const Vec3 zeta1 = 0.5 * xi + c * alpha;
    const Vec3 zeta2 = 0.5 * xi - c * alpha;
    const Vec3 eta1 = random_unit_orthogonal(zeta1, seed, dir_idx, tag + 1u, 1u);
    const Vec3 eta2 = random_unit_orthogonal(zeta2, seed, dir_idx, tag + 2u, 2u);
    for (std::size_t m = 0; m < 3; ++m) a(k, m) = eta1[m] * eta2[m];
  }
  return a;
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace probes_detail

// Condition-number statistics over quasi-uniform directions at each radius,
// for the optimized construction and a seeded random admissible baseline.
inline std::vector<SurveyRow> conditioning_survey(const std::vector<double>& radii,
                                                  std::size_t n_dirs,
                                                  const MaterialParams& p,
                                                  std::uint64_t seed = 1,
                                                  double theta = 0.0) {
  if (n_dirs < 1) throw ValidationError("conditioning_survey: need at least 1 direction");
  for (double r : radii)
    if (!(r > 0.0 && r < 2.0 * p.kappa_s()))
      throw OutOfBandError("conditioning_survey: radius " + std::to_string(r) +
                           " outside (0, 2 kappa_s)");

  const ObservationSet dirs = fibonacci_sphere(std::max<std::size_t>(n_dirs, 2), 1.0);
  std::vector<SurveyRow> rows;
  rows.reserve(radii.size() * 2);

  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    std::vector<double> cond_opt, cond_rand;
    cond_opt.reserve(n_dirs);
    cond_rand.reserve(n_dirs);
    for (std::size_t d = 0; d < n_dirs; ++d) {
      const Vec3 xi = dirs.point(d) * radii[ri];
      cond_opt.push_back(design_triple(xi, p, 1e300, theta).cond);
      const Mat3 a = probes_detail::random_coeff_matrix(
          xi, p, seed, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(ri));
      cond_rand.push_back(cond2_3x3(a));
    }
    for (int which = 0; which < 2; ++which) {
      const auto& v = which == 0 ? cond_opt : cond_rand;
      SurveyRow row;
      row.radius = radii[ri];
      row.construction = which == 0 ? "optimized" : "random";
      double sum = 0.0, mx = 0.0;
      for (double x : v) {
        sum += x;
        mx = std::max(mx, x);
      }
      row.mean = sum / static_cast<double>(v.size());
      row.max = mx;
      row.median = probes_detail::median_of(v);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ersi
