// Cartesian frequency lattice: integer multiples of dxi inside the closed
// ball |xi| <= beta * kappa_s. Only one representative of each +/- pair is
// stored (plus the origin); the mirror half is implied by conjugation of the
// Hermitian-symmetric Fourier data.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ersi/errors.hpp"
#include "ersi/material.hpp"
#include "ersi/vec.hpp"

namespace ersi {

struct LatticePoint {
  int nx = 0, ny = 0, nz = 0;
};

class FrequencyLattice {
 public:
  FrequencyLattice(double dxi, double xi_max, std::vector<LatticePoint> half)
      : dxi_(dxi), xi_max_(xi_max), half_(std::move(half)) {}

  double dxi() const { return dxi_; }
  double xi_max() const { return xi_max_; }

  // Canonical half (origin excluded): lexicographically positive points.
  const std::vector<LatticePoint>& half_points() const { return half_; }
  std::size_t full_size() const { return 2 * half_.size() + 1; }

  Vec3 xi(const LatticePoint& p) const {
    return {dxi_ * p.nx, dxi_ * p.ny, dxi_ * p.nz};
  }

  int max_index() const { return static_cast<int>(std::floor(xi_max_ / dxi_ + 1e-12)); }

 private:
  double dxi_;
  double xi_max_;
  std::vector<LatticePoint> half_;
};

inline FrequencyLattice build_lattice(double beta, double dxi,
                                      const MaterialParams& p) {
  if (!(beta > 0.0 && beta < 2.0))
    throw ValidationError("build_lattice: beta must lie in (0, 2)");
  if (!(dxi > 0.0)) throw ValidationError("build_lattice: dxi must be positive");

  const double xi_max = beta * p.kappa_s();
  const int nmax = static_cast<int>(std::floor(xi_max / dxi + 1e-12));
  const double r2_max = (xi_max / dxi) * (xi_max / dxi) * (1.0 + 1e-12);

  std::vector<LatticePoint> half;
  for (int nz = 0; nz <= nmax; ++nz) {
    for (int ny = (nz == 0 ? 0 : -nmax); ny <= nmax; ++ny) {
      for (int nx = (nz == 0 && ny == 0 ? 1 : -nmax); nx <= nmax; ++nx) {
        const double r2 = double(nx) * nx + double(ny) * ny + double(nz) * nz;
        if (r2 <= r2_max) half.push_back({nx, ny, nz});
      }
    }
  }
  return FrequencyLattice(dxi, xi_max, std::move(half));
}

}  // namespace ersi
