// Random source model: variance profiles, cubic discretization grid, and
// seeded white-noise sampling. The discrete white noise is
//
//     Wdot_j(x) ~= h^{-3/2} sum_t chi_t(x) Z_{t,j},
//
// with one standard Gaussian Z per (cell, sample, component), drawn from the
// counter-based generator so realizations are order- and thread-independent.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ersi/errors.hpp"
#include "ersi/rng.hpp"
#include "ersi/vec.hpp"

namespace ersi {

// Diagonal variance strength sigma(x) = diag(sigma_1, sigma_2, sigma_3).
// Profiles evaluate their formula inside the support box and are identically
// zero outside it; they are stored as evaluable fields, never tabulated.
struct VarianceProfile {
  using Field = std::function<double(const Vec3&)>;
  using Gradient = std::function<Vec3(const Vec3&)>;

  std::array<Field, 3> sigma_field;
  // Analytic gradients of sigma_j (not of sigma_j^2); empty when unknown.
  std::array<Gradient, 3> sigma_gradient;
  Box3 support{};
  bool compact_support = true;

  double sigma(int j, const Vec3& x) const {
    if (compact_support && !support.contains(x)) return 0.0;
    return sigma_field[static_cast<std::size_t>(j)](x);
  }

  double sigma_sq(int j, const Vec3& x) const {
    const double s = sigma(j, x);
    return s * s;
  }

  bool has_gradients() const {
    return sigma_gradient[0] && sigma_gradient[1] && sigma_gradient[2];
  }

  // Gradient of sigma_j^2 = 2 sigma_j grad(sigma_j), zero outside support.
  Vec3 grad_sigma_sq(int j, const Vec3& x) const {
    if (compact_support && !support.contains(x)) return {};
    const auto ju = static_cast<std::size_t>(j);
    const double s = sigma_field[ju](x);
    return 2.0 * s * sigma_gradient[ju](x);
  }
};

enum class BuiltinProfile { kPaper3d };

inline BuiltinProfile parse_profile_name(const std::string& name) {
  if (name == "paper3d") return BuiltinProfile::kPaper3d;
  throw ValidationError("unknown variance profile '" + name + "'");
}

// The three test profiles on the support box [-1,1]^3:
//   sigma_1 = exp(-2 |x|^2)
//   sigma_2 = 0.6 exp(-8 (|x| - 0.75) |x|^2)
//   sigma_3 = 0.8 exp(-4 (x1^2 + (x2-0.4)^2 + (x3-0.4)^2))
//           + 0.8 exp(-4 (x1^2 + (x2+0.4)^2 + (x3+0.4)^2))
inline VarianceProfile builtin_profile(BuiltinProfile which) {
  if (which != BuiltinProfile::kPaper3d)
    throw ValidationError("unknown builtin profile");

  VarianceProfile p;
  p.support = Box3{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
  p.compact_support = true;

  p.sigma_field[0] = [](const Vec3& x) { return std::exp(-2.0 * norm2_sq(x)); };
  p.sigma_gradient[0] = [](const Vec3& x) {
    return -4.0 * std::exp(-2.0 * norm2_sq(x)) * x;
  };

  p.sigma_field[1] = [](const Vec3& x) {
    const double r2 = norm2_sq(x);
    const double r = std::sqrt(r2);
    return 0.6 * std::exp(-8.0 * (r - 0.75) * r2);
  };
  p.sigma_gradient[1] = [](const Vec3& x) {
    const double r2 = norm2_sq(x);
    const double r = std::sqrt(r2);
    const double value = 0.6 * std::exp(-8.0 * (r - 0.75) * r2);
    // d/dr of -8(r^3 - 0.75 r^2) is -8(3r^2 - 1.5r); times x/r.
    return value * (-8.0 * (3.0 * r - 1.5)) * x;
  };

  auto bump = [](const Vec3& x, double sy, double sz) {
    const double q = x.x * x.x + (x.y - sy) * (x.y - sy) + (x.z - sz) * (x.z - sz);
    return 0.8 * std::exp(-4.0 * q);
  };
  p.sigma_field[2] = [bump](const Vec3& x) {
    return bump(x, 0.4, 0.4) + bump(x, -0.4, -0.4);
  };
  p.sigma_gradient[2] = [bump](const Vec3& x) {
    const Vec3 d_plus{x.x, x.y - 0.4, x.z - 0.4};
    const Vec3 d_minus{x.x, x.y + 0.4, x.z + 0.4};
    return -8.0 * (bump(x, 0.4, 0.4) * d_plus + bump(x, -0.4, -0.4) * d_minus);
  };

  return p;
}

inline VarianceProfile builtin_profile(const std::string& name) {
  return builtin_profile(parse_profile_name(name));
}

// Regular grid of cell midpoints tiling a support box. Counts per axis are
// ceil(side/h); the per-axis step is side/count so the tiling is exact even
// when h does not divide the side.
class SourceGrid {
 public:
  SourceGrid(const Box3& box, const Vec3& step, int nx, int ny, int nz)
      : box_(box), step_(step), n_{nx, ny, nz} {}

  const Box3& box() const { return box_; }
  const Vec3& step() const { return step_; }
  int count(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  std::size_t num_cells() const {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]) *
           static_cast<std::size_t>(n_[2]);
  }
  double cell_volume() const { return step_.x * step_.y * step_.z; }

  Vec3 center(int ix, int iy, int iz) const {
    return {box_.lo.x + (ix + 0.5) * step_.x, box_.lo.y + (iy + 0.5) * step_.y,
            box_.lo.z + (iz + 0.5) * step_.z};
  }

  // Linear index order: x fastest, then y, then z.
  Vec3 center(std::size_t t) const {
    const auto nx = static_cast<std::size_t>(n_[0]);
    const auto ny = static_cast<std::size_t>(n_[1]);
    const int ix = static_cast<int>(t % nx);
    const int iy = static_cast<int>((t / nx) % ny);
    const int iz = static_cast<int>(t / (nx * ny));
    return center(ix, iy, iz);
  }

 private:
  Box3 box_;
  Vec3 step_;
  std::array<int, 3> n_;
};

inline SourceGrid build_grid(const Box3& box, double h) {
  if (!(h > 0.0)) throw ValidationError("build_grid: step must be positive");
  const Vec3 side = box.side();
  if (!(side.x > 0.0 && side.y > 0.0 && side.z > 0.0))
    throw ValidationError("build_grid: degenerate support box");
  auto cells = [h](double s) {
    // Guard against h that divides s only up to roundoff (e.g. 2 / 0.1).
    return std::max(1, static_cast<int>(std::ceil(s / h - 1e-9)));
  };
  const int nx = cells(side.x), ny = cells(side.y), nz = cells(side.z);
  const Vec3 step{side.x / nx, side.y / ny, side.z / nz};
  return SourceGrid(box, step, nx, ny, nz);
}

// One white-noise realization: standard normal draws for every cell and
// component of sample j.
struct NoiseRealization {
  std::uint32_t sample = 0;
  std::size_t num_cells = 0;
  std::vector<double> z;  // layout [cell][component]

  double operator()(std::size_t cell, int component) const {
    return z[3 * cell + static_cast<std::size_t>(component)];
  }
};

inline double source_noise_draw(std::uint64_t seed, std::uint32_t sample,
                                std::uint32_t cell, std::uint32_t component) {
  return normal_draw(seed, RngStream::kSourceNoise, cell, sample, component);
}

inline NoiseRealization sample_noise(const SourceGrid& grid, std::uint64_t seed,
                                     std::uint32_t sample) {
  NoiseRealization r;
  r.sample = sample;
  r.num_cells = grid.num_cells();
  r.z.resize(3 * r.num_cells);
  for (std::size_t t = 0; t < r.num_cells; ++t)
    for (std::uint32_t m = 0; m < 3; ++m)
      r.z[3 * t + m] = source_noise_draw(seed, sample, static_cast<std::uint32_t>(t), m);
  return r;
}

}  // namespace ersi
