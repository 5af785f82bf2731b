// Experiment harness: L2 error metrics, the discrete Fourier oracle of the
// variance profiles, the theorem error budget, cutoff and frequency sweeps,
// and slice extraction for figure data.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ersi/forward.hpp"
#include "ersi/lattice.hpp"
#include "ersi/reconstruct.hpp"
#include "ersi/source.hpp"

namespace ersi {

// --- Discrete Fourier oracle ------------------------------------------------

// Midpoint-rule transform of sigma_j^2 on a grid: h^3 sum_t sigma_j^2(x_t)
// e^{-i xi . x_t}. This is the exact Fourier data of the discretized model
// and is independent of the boundary-data path.
inline CVec3 discrete_profile_transform(const SourceGrid& grid,
                                        const VarianceProfile& profile,
                                        const Vec3& xi) {
  CVec3 acc{};
  const std::size_t n = grid.num_cells();
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 x = grid.center(t);
    const Complex e = std::exp(Complex(0.0, -dot(xi, x)));
    for (int m = 0; m < 3; ++m) acc[static_cast<std::size_t>(m)] += profile.sigma_sq(m, x) * e;
  }
  const double vol = grid.cell_volume();
  return {acc.x * vol, acc.y * vol, acc.z * vol};
}

// Exact Fourier values of the profile on a whole lattice, packaged as a
// FourierField so it can drive the synthesis directly (oracle-fed runs that
// bypass boundary data entirely). Evaluated separably axis by axis.
inline FourierField oracle_fourier_field(const SourceGrid& grid,
                                         const VarianceProfile& profile,
                                         const FrequencyLattice& lattice) {
  const int nmax = lattice.max_index();
  const int dim = 2 * nmax + 1;
  const double dxi = lattice.dxi();

  const auto xs = grid_axis_centers(grid, 0);
  const auto ys = grid_axis_centers(grid, 1);
  const auto zs = grid_axis_centers(grid, 2);
  const std::size_t nx = xs.size(), ny = ys.size(), nz = zs.size();

  auto phase_table = [&](const std::vector<double>& coords) {
    std::vector<Complex> t(coords.size() * static_cast<std::size_t>(dim));
    for (std::size_t c = 0; c < coords.size(); ++c)
      for (int n = -nmax; n <= nmax; ++n)
        t[c * dim + static_cast<std::size_t>(n + nmax)] =
            std::exp(Complex(0.0, -dxi * n * coords[c]));
    return t;
  };
  const auto px = phase_table(xs);
  const auto py = phase_table(ys);
  const auto pz = phase_table(zs);

  FourierField field{lattice};
  field.half_values.assign(lattice.half_points().size(), CVec3{});
  field.half_diag.assign(lattice.half_points().size(), SolveDiagnostics{});

  const std::size_t comp_stride = static_cast<std::size_t>(dim) * dim * dim;
  std::vector<Complex> cube(3 * comp_stride);

  std::vector<Complex> s1(nx * ny * static_cast<std::size_t>(dim));
  std::vector<Complex> s2(nx * static_cast<std::size_t>(dim) * dim);
  for (std::size_t m = 0; m < 3; ++m) {
    // Stage 1: sum over z for each (x, y, n3).
    for (std::size_t xa = 0; xa < nx; ++xa)
      for (std::size_t yb = 0; yb < ny; ++yb) {
        std::vector<Complex> col(nz);
        for (std::size_t c = 0; c < nz; ++c)
          col[c] = profile.sigma_sq(static_cast<int>(m), {xs[xa], ys[yb], zs[c]});
        for (int n = 0; n < dim; ++n) {
          Complex acc{};
          for (std::size_t c = 0; c < nz; ++c)
            acc += col[c] * pz[c * dim + static_cast<std::size_t>(n)];
          s1[(xa * ny + yb) * dim + static_cast<std::size_t>(n)] = acc;
        }
      }
    // Stage 2: sum over y.
    for (std::size_t xa = 0; xa < nx; ++xa)
      for (int n2 = 0; n2 < dim; ++n2)
        for (int n3 = 0; n3 < dim; ++n3) {
          Complex acc{};
          for (std::size_t yb = 0; yb < ny; ++yb)
            acc += s1[(xa * ny + yb) * dim + static_cast<std::size_t>(n3)] *
                   py[yb * dim + static_cast<std::size_t>(n2)];
          s2[(xa * dim + static_cast<std::size_t>(n2)) * dim +
             static_cast<std::size_t>(n3)] = acc;
        }
    // Stage 3: sum over x. The loop indices are already the shifted lattice
    // offsets in [0, dim).
    for (int n1 = 0; n1 < dim; ++n1)
      for (int n2 = 0; n2 < dim; ++n2)
        for (int n3 = 0; n3 < dim; ++n3) {
          Complex acc{};
          for (std::size_t xa = 0; xa < nx; ++xa)
            acc += s2[(xa * dim + static_cast<std::size_t>(n2)) * dim +
                      static_cast<std::size_t>(n3)] *
                   px[xa * dim + static_cast<std::size_t>(n1)];
          cube[m * comp_stride +
               static_cast<std::size_t>((n1 * dim + n2) * dim + n3)] =
              acc * grid.cell_volume();
        }
  }

  const auto at = [&](int a, int b, int c) {
    return static_cast<std::size_t>(((a + nmax) * dim + (b + nmax)) * dim + (c + nmax));
  };
  for (std::size_t m = 0; m < 3; ++m)
    field.origin_value[m] = cube[m * comp_stride + at(0, 0, 0)];
  const auto& half = lattice.half_points();
  for (std::size_t h = 0; h < half.size(); ++h)
    for (std::size_t m = 0; m < 3; ++m)
      field.half_values[h][m] =
          cube[m * comp_stride + at(half[h].nx, half[h].ny, half[h].nz)];
  return field;
}

// --- Error metrics ------------------------------------------------------------

struct RunParams {
  double kappa = 0.0;
  double beta = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_obs = 0;
  double h = 0.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double dxi = 0.0;
};

struct ErrorReport {
  std::array<double, 3> err{};  // per-component L2 relative errors
  double mean_err = 0.0;
  double max_abs = 0.0;  // max |reconstruction - truth| over the scanned points
  RunParams params{};
};

// Midpoint-rule L2 relative errors of the raw reconstructed field against
// the profile truth, plus the max absolute pointwise error.
inline ErrorReport l2_relative_error(const VarianceField& recon,
                                     const VarianceProfile& truth,
                                     const RunParams& params = {}) {
  ErrorReport rep;
  rep.params = params;
  const std::size_t n = recon.grid.num_cells();
  for (std::size_t m = 0; m < 3; ++m)
    if (recon.raw[m].size() != n)
      throw ValidationError("l2_relative_error: field does not match its grid");

  for (std::size_t m = 0; m < 3; ++m) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const Vec3 x = recon.grid.center(t);
      const double truth_val = truth.sigma_sq(static_cast<int>(m), x);
      const double d = recon.raw[m][t] - truth_val;
      num += d * d;
      den += truth_val * truth_val;
      rep.max_abs = std::max(rep.max_abs, std::abs(d));
    }
    rep.err[m] = den > 0.0 ? std::sqrt(num / den)
                           : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  rep.mean_err = (rep.err[0] + rep.err[1] + rep.err[2]) / 3.0;
  return rep;
}

// Absolute L2 norm of the vector error, sqrt(sum_j ||recon_j - truth_j||^2),
// the quantity the theorem bounds.
inline double l2_absolute_error(const VarianceField& recon,
                                const VarianceProfile& truth) {
  const std::size_t n = recon.grid.num_cells();
  const double vol = recon.grid.cell_volume();
  double acc = 0.0;
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t t = 0; t < n; ++t) {
      const double d =
          recon.raw[m][t] - truth.sigma_sq(static_cast<int>(m), recon.grid.center(t));
      acc += d * d * vol;
    }
  return std::sqrt(acc);
}

// --- Theorem error budget -----------------------------------------------------

struct ErrorBudget {
  double m_bound = 0.0;      // max_j ||sigma_j^2||_{H^1(D)}
  double c1 = 0.0;           // max over lattice of cond(A)/||A||_2
  double c2 = 0.0;           // sqrt(2) ||sigma||^2_{L^2(D)}
  double c3 = 0.0;           // measured data constant
  double epsilon = 0.0;      // measured per-sample data perturbation
  double xi_max = 0.0;
  std::size_t n_samples = 0;
  double truncation_term = 0.0;  // sqrt(3) M / sqrt(1 + xi_max^2)
  double low_freq_term = 0.0;    // sqrt(4 pi/3) xi_max^{3/2} C1 (C2/sqrt(Ns) + C3 eps)
  double total = 0.0;
};

// H^1(D)-norm squared of sigma_j^2 by midpoint quadrature. Uses analytic
// profile gradients when available, otherwise central differences (with the
// corresponding accuracy loss for user-supplied profiles).
inline double h1_norm_sq(const VarianceProfile& profile, const SourceGrid& grid,
                         int component) {
  const std::size_t n = grid.num_cells();
  const double vol = grid.cell_volume();
  double acc = 0.0;
  const double fd_step = 1e-6;
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 x = grid.center(t);
    const double v = profile.sigma_sq(component, x);
    Vec3 g;
    if (profile.has_gradients()) {
      g = profile.grad_sigma_sq(component, x);
    } else {
      for (std::size_t a = 0; a < 3; ++a) {
        Vec3 xp = x, xm = x;
        xp[a] += fd_step;
        xm[a] -= fd_step;
        g[a] = (profile.sigma_sq(component, xp) - profile.sigma_sq(component, xm)) /
               (2.0 * fd_step);
      }
    }
    acc += (v * v + norm2_sq(g)) * vol;
  }
  return acc;
}

inline double l2_norm_sq_of_sigma(const VarianceProfile& profile,
                                  const SourceGrid& grid) {
  const std::size_t n = grid.num_cells();
  const double vol = grid.cell_volume();
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 x = grid.center(t);
    for (int m = 0; m < 3; ++m) acc += profile.sigma_sq(m, x) * vol;
  }
  return acc;
}

// The a-priori bound of the reconstruction error:
//   sqrt(4 pi / 3) xi_max^{3/2} C1 (C2 / sqrt(Ns) + C3 eps)
//     + sqrt(3) M / sqrt(1 + xi_max^2).
// C1 is evaluated over the actual lattice; C3 and eps are measured by the
// caller (zero for noiseless data).
inline ErrorBudget error_budget(const VarianceProfile& profile, const SourceGrid& grid,
                                const MaterialParams& p, double beta, double dxi,
                                std::size_t n_samples, double epsilon_measured = 0.0,
                                double c3_measured = 0.0) {
  ErrorBudget b;
  b.n_samples = n_samples;
  b.xi_max = beta * p.kappa_s();
  b.epsilon = epsilon_measured;
  b.c3 = c3_measured;

  double m_sq = 0.0;
  for (int m = 0; m < 3; ++m) m_sq = std::max(m_sq, h1_norm_sq(profile, grid, m));
  b.m_bound = std::sqrt(m_sq);

  const FrequencyLattice lattice = build_lattice(beta, dxi, p);
  double worst = design_triple(Vec3{}, p, 1e300).cond /
                 design_triple(Vec3{}, p, 1e300).norm;
  for (const auto& h : lattice.half_points()) {
    const ProbeTriple t = design_triple(lattice.xi(h), p, 1e300);
    if (t.norm > 0.0) worst = std::max(worst, t.cond / t.norm);
  }
  b.c1 = worst;

  b.c2 = std::sqrt(2.0) * l2_norm_sq_of_sigma(profile, grid);

  b.truncation_term = std::sqrt(3.0) * b.m_bound / std::sqrt(1.0 + b.xi_max * b.xi_max);
  b.low_freq_term = std::sqrt(4.0 * M_PI / 3.0) * std::pow(b.xi_max, 1.5) * b.c1 *
                    (b.c2 / std::sqrt(static_cast<double>(n_samples)) +
                     b.c3 * b.epsilon);
  b.total = b.low_freq_term + b.truncation_term;
  return b;
}

// Quadrature-weighted L1 norm of the per-sample data perturbation,
// max over samples and fields: the measured epsilon of the theorem.
inline double measure_epsilon(const Dataset& noisy, const Dataset& clean) {
  if (noisy.n_samples != clean.n_samples || noisy.obs.size() != clean.obs.size())
    throw ValidationError("measure_epsilon: datasets are not aligned");
  const double w = clean.obs.weight();
  double worst = 0.0;
  for (std::size_t j = 0; j < clean.n_samples; ++j) {
    double du_norm = 0.0, u_norm = 0.0;
    for (std::size_t i = 0; i < clean.obs.size(); ++i) {
      u_norm += w * norm2(noisy.u_at(j, i) - clean.u_at(j, i));
      du_norm += w * norm2(noisy.du_at(j, i) - clean.du_at(j, i));
    }
    worst = std::max(worst, std::max(u_norm, du_norm));
  }
  return worst;
}

// --- Sweeps -------------------------------------------------------------------

struct SweepRow {
  double parameter = 0.0;  // |xi|_max for cutoff sweeps, kappa for frequency sweeps
  ErrorReport report;
};

// One simulation, many reconstructions: the correlation data is assembled
// once at the largest cutoff and each row synthesizes a truncation of it.
inline std::vector<SweepRow> sweep_cutoff(const Dataset& data, const MaterialParams& p,
                                          const std::vector<double>& xi_max_list,
                                          double dxi, const SourceGrid& eval_grid,
                                          const VarianceProfile& truth,
                                          const ReconstructOptions& opt = {},
                                          RunParams base_params = {}) {
  if (xi_max_list.empty()) throw ValidationError("sweep_cutoff: empty cutoff list");
  double xi_max = 0.0;
  for (double c : xi_max_list) {
    if (!(c > 0.0 && c < 2.0 * p.kappa_s()))
      throw ValidationError("sweep_cutoff: cutoff outside (0, 2 kappa_s)");
    xi_max = std::max(xi_max, c);
  }

  const double beta_max = xi_max / p.kappa_s();
  const FrequencyLattice lattice = build_lattice(beta_max, dxi, p);
  const FourierField fourier = assemble_correlation(data, lattice, p, opt);

  std::vector<SweepRow> rows;
  rows.reserve(xi_max_list.size());
  for (double cutoff : xi_max_list) {
    const VarianceField field = synthesize_on_grid(fourier, eval_grid, cutoff);
    RunParams params = base_params;
    params.kappa = p.kappa();
    params.beta = cutoff / p.kappa_s();
    params.dxi = dxi;
    SweepRow row;
    row.parameter = cutoff;
    row.report = l2_relative_error(field, truth, params);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct FrequencySweepConfig {
  double lambda = 2.0;
  double mu = 1.0;
  double radius = 2.0;
  std::size_t n_obs = 1024;
  std::size_t n_samples = 2000;
  double noise_level = 0.05;
  NoiseMode noise_mode = NoiseMode::kPerComponent;
  std::uint64_t seed = 1;
  double dxi = 0.5;
  // Candidate cutoffs beta = |xi|_max / kappa_s searched per frequency.
  std::vector<double> beta_grid = {0.8, 0.875, 1.0, 1.125, 1.25};
};

struct FrequencySweepRow {
  double kappa = 0.0;
  double beta_chosen = 0.0;
  ErrorReport report;
};

// Per-frequency simulation with shared seeds; the cutoff is chosen per
// frequency by grid search over beta, keeping the row with the smallest
// mean error.
inline std::vector<FrequencySweepRow> sweep_frequency(
    const std::vector<double>& kappa_list, const SourceGrid& grid,
    const VarianceProfile& profile, const SourceGrid& eval_grid,
    const FrequencySweepConfig& cfg, const ReconstructOptions& opt = {},
    const SimulateOptions& sim_opt = {}) {
  if (kappa_list.empty()) throw ValidationError("sweep_frequency: empty kappa list");
  if (cfg.beta_grid.empty())
    throw ValidationError("sweep_frequency: empty beta grid");

  std::vector<FrequencySweepRow> rows;
  rows.reserve(kappa_list.size());
  for (double kappa : kappa_list) {
    const MaterialParams p(cfg.lambda, cfg.mu, kappa);
    const ObservationSet obs = fibonacci_sphere(cfg.n_obs, cfg.radius);
    Dataset data = simulate(grid, profile, p, obs, cfg.n_samples, cfg.seed, sim_opt);
    if (cfg.noise_level > 0.0)
      data = add_noise(data, cfg.noise_level, cfg.seed, cfg.noise_mode);

    std::vector<double> cutoffs;
    cutoffs.reserve(cfg.beta_grid.size());
    for (double beta : cfg.beta_grid) cutoffs.push_back(beta * p.kappa_s());

    RunParams params;
    params.kappa = kappa;
    params.n_samples = cfg.n_samples;
    params.n_obs = cfg.n_obs;
    params.h = grid.step().x;
    params.noise = cfg.noise_level;
    params.seed = cfg.seed;
    params.dxi = cfg.dxi;

    const auto sweep =
        sweep_cutoff(data, p, cutoffs, cfg.dxi, eval_grid, profile, opt, params);
    const auto best = std::min_element(
        sweep.begin(), sweep.end(), [](const SweepRow& a, const SweepRow& b) {
          return a.report.mean_err < b.report.mean_err;
        });
    FrequencySweepRow row;
    row.kappa = kappa;
    row.beta_chosen = best->parameter / p.kappa_s();
    row.report = best->report;
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- Slice extraction -----------------------------------------------------------

struct SliceData {
  int plane_axis = 0;       // 0: x=0 plane, 1: y=0, 2: z=0
  std::vector<double> c1;   // first in-plane coordinate, slow index
  std::vector<double> c2;   // second in-plane coordinate, fast index
  // [component][i1 * c2.size() + i2]
  std::array<std::vector<double>, 3> recon;
  std::array<std::vector<double>, 3> truth;
  std::array<std::vector<double>, 3> diff;
  double max_abs_diff = 0.0;
};

// Evaluates the synthesis and the profile truth on the coordinate plane
// {x_axis = 0} over the evaluation grid's in-plane centers.
inline SliceData extract_slice(const FourierField& fourier,
                               const VarianceProfile& truth, const SourceGrid& grid,
                               int plane_axis, double cutoff) {
  if (plane_axis < 0 || plane_axis > 2)
    throw ValidationError("extract_slice: plane axis must be 0..2");
  const int a1 = plane_axis == 0 ? 1 : 0;
  const int a2 = plane_axis == 2 ? 1 : 2;

  SliceData s;
  s.plane_axis = plane_axis;
  s.c1 = grid_axis_centers(grid, a1);
  s.c2 = grid_axis_centers(grid, a2);

  std::vector<double> axes[3];
  axes[static_cast<std::size_t>(plane_axis)] = {0.0};
  axes[static_cast<std::size_t>(a1)] = s.c1;
  axes[static_cast<std::size_t>(a2)] = s.c2;
  const auto syn =
      recon_detail::synthesize_axes(fourier, axes[0], axes[1], axes[2], cutoff);

  const std::size_t n1 = s.c1.size(), n2 = s.c2.size();
  for (std::size_t m = 0; m < 3; ++m) {
    s.recon[m].resize(n1 * n2);
    s.truth[m].resize(n1 * n2);
    s.diff[m].resize(n1 * n2);
  }
  // synthesize_axes output is x-slowest / z-fastest regardless of which axis
  // is the singleton plane, so the (i1, i2) element sits at a stride pattern
  // determined by the axis roles.
  const std::size_t ny = axes[1].size(), nz = axes[2].size();
  auto syn_index = [&](std::size_t i1, std::size_t i2) {
    std::size_t idx[3] = {0, 0, 0};
    idx[static_cast<std::size_t>(a1)] = i1;
    idx[static_cast<std::size_t>(a2)] = i2;
    return (idx[0] * ny + idx[1]) * nz + idx[2];
  };

  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t i1 = 0; i1 < n1; ++i1)
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        Vec3 x{};
        x[static_cast<std::size_t>(plane_axis)] = 0.0;
        x[static_cast<std::size_t>(a1)] = s.c1[i1];
        x[static_cast<std::size_t>(a2)] = s.c2[i2];
        const double r = syn.raw[m][syn_index(i1, i2)];
        const double tv = truth.sigma_sq(static_cast<int>(m), x);
        const std::size_t q = i1 * n2 + i2;
        s.recon[m][q] = r;
        s.truth[m][q] = tv;
        s.diff[m][q] = r - tv;
        s.max_abs_diff = std::max(s.max_abs_diff, std::abs(r - tv));
      }
  return s;
}

}  // namespace ersi
