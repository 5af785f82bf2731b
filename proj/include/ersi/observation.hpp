// Observation geometry: Fibonacci-lattice points on the sphere |x| = R with
// equal quadrature weights 4 pi R^2 / N.
//
// For even N the lattice is antipodally paired: the colatitudes are the
// standard midpoint ladder z_i = 1 - (2i+1)/N, the upper hemisphere carries
// the golden-angle spiral, and each lower point is the exact antipode of its
// partner. Odd-degree integrands then cancel exactly, which the surface
// quadrature of wave fields benefits from. Odd N falls back to the plain
// spiral.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ersi/errors.hpp"
#include "ersi/vec.hpp"

namespace ersi {

class ObservationSet {
 public:
  ObservationSet(double radius, std::vector<Vec3> points)
      : radius_(radius), points_(std::move(points)) {}

  double radius() const { return radius_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }
  const Vec3& point(std::size_t i) const { return points_[i]; }
  Vec3 normal(std::size_t i) const { return points_[i] / radius_; }

  // Equal-weight quadrature: sum_i w f(x_i) ~ integral over the sphere.
  double weight() const {
    return 4.0 * M_PI * radius_ * radius_ / static_cast<double>(points_.size());
  }

 private:
  double radius_;
  std::vector<Vec3> points_;
};

inline ObservationSet fibonacci_sphere(std::size_t n, double radius) {
  if (n < 2) throw ValidationError("fibonacci_sphere: need at least 2 points");
  if (!(radius > 0.0)) throw ValidationError("fibonacci_sphere: radius must be positive");

  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> pts(n);

  auto unit_point = [&](std::size_t i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    return Vec3{rho * std::cos(phi), rho * std::sin(phi), z};
  };

  if (n % 2 == 0) {
    for (std::size_t i = 0; i < n / 2; ++i) {
      const Vec3 p = unit_point(i);
      pts[i] = p * radius;
      pts[n - 1 - i] = -p * radius;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) pts[i] = unit_point(i) * radius;
  }
  return ObservationSet(radius, std::move(pts));
}

}  // namespace ersi
