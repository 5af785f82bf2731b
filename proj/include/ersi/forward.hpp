// Synthetic data generation. For each sample j the mild solution and its
// traction are evaluated at the observation points by direct convolution of
// the Green tensor with the discretized white-noise source:
//
//     u(x_i)  = h^{3/2} sum_t G(x_i, x_t) sigma(x_t) Z_{t,j}
//     Du(x_i) = h^{3/2} sum_t T(x_i, x_t; nu_i) sigma(x_t) Z_{t,j}
//
// The Green matrix is never materialized: accumulation runs over cell blocks
// against sample blocks, with the per-(i,t) tensors recomputed per block.
// Summation order is fixed (cells ascending within ascending blocks), so the
// result is independent of the worker count.

#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "ersi/elastics.hpp"
#include "ersi/errors.hpp"
#include "ersi/material.hpp"
#include "ersi/observation.hpp"
#include "ersi/parallel.hpp"
#include "ersi/rng.hpp"
#include "ersi/source.hpp"
#include "ersi/vec.hpp"

namespace ersi {

// How measurement noise multiplies the data. The default applies one real
// factor (1 + level * rand) to each complex component of each field.
enum class NoiseMode {
  kPerComponent,  // one factor per complex component
  kPerRealImag,   // separate factors for real and imaginary parts
  kPerVector,     // one factor per 3-vector per field
};

inline NoiseMode parse_noise_mode(const std::string& s) {
  if (s == "component") return NoiseMode::kPerComponent;
  if (s == "real-imag") return NoiseMode::kPerRealImag;
  if (s == "vector") return NoiseMode::kPerVector;
  throw ValidationError("unknown noise mode '" + s + "'");
}

// Boundary data for all samples: u[j][i] and Du[j][i] as complex 3-vectors,
// stored flat in (sample, point, component) order.
struct Dataset {
  MaterialParams material;
  ObservationSet obs;
  std::size_t n_samples = 0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  std::vector<Complex> u;
  std::vector<Complex> du;

  Dataset(MaterialParams m, ObservationSet o) : material(m), obs(std::move(o)) {}

  std::size_t flat_index(std::size_t j, std::size_t i) const {
    return (j * obs.size() + i) * 3;
  }
  CVec3 u_at(std::size_t j, std::size_t i) const {
    const std::size_t q = flat_index(j, i);
    return {u[q], u[q + 1], u[q + 2]};
  }
  CVec3 du_at(std::size_t j, std::size_t i) const {
    const std::size_t q = flat_index(j, i);
    return {du[q], du[q + 1], du[q + 2]};
  }
};

struct SimulateOptions {
  int workers = 1;
  std::size_t sample_block = 256;
  std::size_t cell_block = 128;
  // Cells where every sigma_j falls below this are skipped in the sums.
  double prune_threshold = 1e-9;
};

namespace forward_detail {

struct ActiveCells {
  std::vector<Vec3> centers;
  std::vector<double> sigma;          // [cell][component]
  std::vector<std::uint32_t> index;   // original linear cell index (noise key)
};

inline ActiveCells collect_active_cells(const SourceGrid& grid,
                                        const VarianceProfile& profile,
                                        double prune_threshold) {
  ActiveCells out;
  const std::size_t n = grid.num_cells();
  out.centers.reserve(n);
  out.sigma.reserve(3 * n);
  out.index.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 x = grid.center(t);
    const double s0 = profile.sigma(0, x);
    const double s1 = profile.sigma(1, x);
    const double s2 = profile.sigma(2, x);
    if (s0 < prune_threshold && s1 < prune_threshold && s2 < prune_threshold)
      continue;
    out.centers.push_back(x);
    out.sigma.push_back(s0);
    out.sigma.push_back(s1);
    out.sigma.push_back(s2);
    out.index.push_back(static_cast<std::uint32_t>(t));
  }
  return out;
}

}  // namespace forward_detail

inline void check_support_inside_sphere(const Box3& support, double radius) {
  double corner_max = 0.0;
  for (int cx = 0; cx < 2; ++cx)
    for (int cy = 0; cy < 2; ++cy)
      for (int cz = 0; cz < 2; ++cz) {
        const Vec3 corner{cx ? support.hi.x : support.lo.x,
                          cy ? support.hi.y : support.lo.y,
                          cz ? support.hi.z : support.lo.z};
        corner_max = std::max(corner_max, norm2(corner));
      }
  if (corner_max >= radius * (1.0 - 1e-12))
    throw GeometryError("source support touches the observation sphere");
}

// Noiseless synthetic dataset.
inline Dataset simulate(const SourceGrid& grid, const VarianceProfile& profile,
                        const MaterialParams& material, const ObservationSet& obs,
                        std::size_t n_samples, std::uint64_t seed,
                        const SimulateOptions& opt = {}) {
  check_support_inside_sphere(grid.box(), obs.radius());

  Dataset ds(material, obs);
  ds.n_samples = n_samples;
  ds.seed = seed;
  ds.noise_level = 0.0;
  const std::size_t n_obs = obs.size();
  ds.u.assign(n_samples * n_obs * 3, Complex{});
  ds.du.assign(n_samples * n_obs * 3, Complex{});
  if (n_samples == 0) return ds;

  const auto cells =
      forward_detail::collect_active_cells(grid, profile, opt.prune_threshold);
  const std::size_t n_cells = cells.centers.size();
  if (n_cells == 0) return ds;

  // h^{3/2} for cubic cells of volume h^3; the white-noise increment over a
  // cell has standard deviation |K_t|^{1/2}.
  const double scale = std::sqrt(grid.cell_volume());

  const std::size_t bj = std::max<std::size_t>(1, opt.sample_block);
  const std::size_t bt = std::max<std::size_t>(1, opt.cell_block);
  const std::size_t n_jblocks = chunk_count(n_samples, bj);

  parallel_chunks(n_jblocks, opt.workers, [&](std::size_t jb) {
    const std::size_t j0 = jb * bj;
    const std::size_t j1 = std::min(n_samples, j0 + bj);
    const std::size_t nj = j1 - j0;

    // Accumulators: [i][component][j] with separate re/im planes.
    std::vector<double> acc(n_obs * 3 * nj * 4, 0.0);
    auto plane = [&](std::size_t which, std::size_t i, std::size_t m) {
      return acc.data() + ((which * n_obs + i) * 3 + m) * nj;
    };

    std::vector<double> v;  // [cell-in-block][component][j]
    CMat3 g_mat, t_mat;

    for (std::size_t t0 = 0; t0 < n_cells; t0 += bt) {
      const std::size_t t1 = std::min(n_cells, t0 + bt);
      const std::size_t nt = t1 - t0;

      v.assign(nt * 3 * nj, 0.0);
      for (std::size_t tt = 0; tt < nt; ++tt) {
        const std::uint32_t cell_key = cells.index[t0 + tt];
        for (std::uint32_t m = 0; m < 3; ++m) {
          const double sig = cells.sigma[(t0 + tt) * 3 + m];
          double* row = &v[(tt * 3 + m) * nj];
          if (sig == 0.0) continue;
          for (std::size_t jj = 0; jj < nj; ++jj)
            row[jj] = sig * source_noise_draw(
                                seed, static_cast<std::uint32_t>(j0 + jj), cell_key, m);
        }
      }

      for (std::size_t i = 0; i < n_obs; ++i) {
        const Vec3 xi = obs.point(i);
        const Vec3 nu = obs.normal(i);
        for (std::size_t tt = 0; tt < nt; ++tt) {
          green_pair(xi, cells.centers[t0 + tt], nu, material, g_mat, t_mat);
          for (std::size_t m = 0; m < 3; ++m) {
            double* ur = plane(0, i, m);
            double* ui = plane(1, i, m);
            double* dr = plane(2, i, m);
            double* di = plane(3, i, m);
            for (std::size_t n = 0; n < 3; ++n) {
              const double gr = g_mat(m, n).real(), gi = g_mat(m, n).imag();
              const double tr = t_mat(m, n).real(), ti = t_mat(m, n).imag();
              const double* vv = &v[(tt * 3 + n) * nj];
              for (std::size_t jj = 0; jj < nj; ++jj) {
                ur[jj] += gr * vv[jj];
                ui[jj] += gi * vv[jj];
                dr[jj] += tr * vv[jj];
                di[jj] += ti * vv[jj];
              }
            }
          }
        }
      }
    }

    // Scatter the block accumulators into (j, i, m) order with the h^{3/2} factor.
    for (std::size_t jj = 0; jj < nj; ++jj) {
      for (std::size_t i = 0; i < n_obs; ++i) {
        const std::size_t q = ((j0 + jj) * n_obs + i) * 3;
        for (std::size_t m = 0; m < 3; ++m) {
          ds.u[q + m] = scale * Complex(plane(0, i, m)[jj], plane(1, i, m)[jj]);
          ds.du[q + m] = scale * Complex(plane(2, i, m)[jj], plane(3, i, m)[jj]);
        }
      }
    }
  });

  return ds;
}

// Returns a copy of the dataset with multiplicative measurement noise.
// Factors are drawn independently per (sample, point, component, field) in
// the default mode; the original dataset is untouched.
inline Dataset add_noise(const Dataset& data, double level, std::uint64_t seed,
                         NoiseMode mode = NoiseMode::kPerComponent) {
  if (level < 0.0) throw ValidationError("add_noise: negative noise level");
  Dataset out = data;
  out.noise_level = level;
  if (level == 0.0) return out;

  const std::size_t n_obs = data.obs.size();
  for (std::size_t j = 0; j < data.n_samples; ++j) {
    for (std::size_t i = 0; i < n_obs; ++i) {
      const std::size_t q = (j * n_obs + i) * 3;
      const auto ji = static_cast<std::uint32_t>(j);
      const auto ii = static_cast<std::uint32_t>(i);
      for (int field = 0; field < 2; ++field) {
        std::vector<Complex>& arr = field == 0 ? out.u : out.du;
        switch (mode) {
          case NoiseMode::kPerComponent:
            for (std::uint32_t m = 0; m < 3; ++m) {
              const double r = uniform_pm1_draw(seed, RngStream::kMeasurementNoise,
                                                ii, ji, m + 3u * field);
              arr[q + m] *= 1.0 + level * r;
            }
            break;
          case NoiseMode::kPerRealImag:
            for (std::uint32_t m = 0; m < 3; ++m) {
              const double rr = uniform_pm1_draw(seed, RngStream::kMeasurementNoise,
                                                 ii, ji, m + 3u * field + 6u);
              const double rim = uniform_pm1_draw(seed, RngStream::kMeasurementNoise,
                                                  ii, ji, m + 3u * field + 12u);
              arr[q + m] = Complex(arr[q + m].real() * (1.0 + level * rr),
                                   arr[q + m].imag() * (1.0 + level * rim));
            }
            break;
          case NoiseMode::kPerVector: {
            const double r = uniform_pm1_draw(seed, RngStream::kMeasurementNoise,
                                              ii, ji, 18u + field);
            for (std::uint32_t m = 0; m < 3; ++m) arr[q + m] *= 1.0 + level * r;
            break;
          }
        }
      }
    }
  }
  return out;
}

// Discrete volume functional h^{3/2} sum_t (sigma(x_t) Z_{t,j}) . U(x_t).
// This is the source-side value the boundary quadrature must reproduce; it
// is independent of the Green-tensor path and serves as its oracle.
inline Complex volume_functional(const SourceGrid& grid, const VarianceProfile& profile,
                                 std::uint64_t seed, std::uint32_t sample,
                                 const PlaneWaveProbe& probe) {
  const double h32 = std::sqrt(grid.cell_volume());
  Complex acc{};
  const std::size_t n = grid.num_cells();
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 x = grid.center(t);
    double weighted[3];
    bool any = false;
    for (int m = 0; m < 3; ++m) {
      const double s = profile.sigma(m, x);
      weighted[m] = s;
      any = any || s != 0.0;
    }
    if (!any) continue;
    Vec3 sz{};
    for (std::uint32_t m = 0; m < 3; ++m)
      sz[m] = weighted[m] *
              source_noise_draw(seed, sample, static_cast<std::uint32_t>(t), m);
    acc += dot(sz, probe.eta()) * std::exp(Complex(0.0, dot(probe.zeta(), x)));
  }
  return h32 * acc;
}

}  // namespace ersi
