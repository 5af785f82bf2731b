// Single-frequency variance reconstruction.
//
// Per frequency point xi: three probe pairs give boundary functionals
//
//     I_l^(k)(j) = (4 pi R^2 / N_ob) sum_i [ Du(x_i,w_j) . U_l(x_i)
//                                          - D U_l(x_i) . u(x_i,w_j) ],
//
// (bilinear dots, no conjugation), the correlation data is the sample mean
// b_k = mean_j I_1^(k)(j) I_2^(k)(j), and solving A x = b yields the Fourier
// transforms (sigma_1^2, sigma_2^2, sigma_3^2)^ at -xi. Only a half-lattice
// is solved; the mirror half follows from Hermitian symmetry of the real
// field sigma^2. Synthesis is the truncated inverse transform
//
//     sigma_j^2(x) = (2 pi)^-3 dxi^3 sum_{xi in Xi} sigma_j^2^(xi) e^{i xi.x}.
//
// The lattice sweep is organized in (xi-chunk, sample-block, point-block)
// tiles with fixed summation order, so results do not depend on the worker
// count. The separable synthesis evaluates the same sum axis by axis and
// agrees with the direct sum to ~1e-15 relative.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ersi/elastics.hpp"
#include "ersi/errors.hpp"
#include "ersi/forward.hpp"
#include "ersi/lattice.hpp"
#include "ersi/linalg3.hpp"
#include "ersi/parallel.hpp"
#include "ersi/probes.hpp"
#include "ersi/source.hpp"
#include "ersi/vec.hpp"

namespace ersi {

// Quadrature of the boundary identity for one sample and one probe.
inline Complex boundary_functional(const Dataset& data, std::size_t j,
                                   const PlaneWaveProbe& probe,
                                   const MaterialParams& p) {
  if (j >= data.n_samples)
    throw ValidationError("boundary_functional: sample index out of range");
  const std::size_t n_obs = data.obs.size();
  Complex acc{};
  for (std::size_t i = 0; i < n_obs; ++i) {
    const Vec3 xi = data.obs.point(i);
    const Vec3 nu = data.obs.normal(i);
    const Complex phase = std::exp(Complex(0.0, dot(probe.zeta(), xi)));
    const Complex trac = Complex(0.0, p.mu() * dot(probe.zeta(), nu)) * phase;
    const CVec3 du = data.du_at(j, i);
    const CVec3 u = data.u_at(j, i);
    acc += phase * dot(probe.eta(), du) - trac * dot(probe.eta(), u);
  }
  return data.obs.weight() * acc;
}

// Correlation data b_k for one probe triple: the sample mean of the product
// of the two boundary functionals of pair k.
inline CVec3 correlation_rhs(const Dataset& data, const ProbeTriple& triple,
                             const MaterialParams& p) {
  if (data.n_samples == 0)
    throw ValidationError("correlation_rhs: empty dataset");
  CVec3 b{};
  for (std::size_t k = 0; k < 3; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < data.n_samples; ++j) {
      const Complex i1 = boundary_functional(data, j, triple.pairs[k].u1, p);
      const Complex i2 = boundary_functional(data, j, triple.pairs[k].u2, p);
      acc += i1 * i2;
    }
    b[k] = acc / static_cast<double>(data.n_samples);
  }
  return b;
}

// Mean and Monte Carlo standard error of the correlation data.
struct CorrelationStats {
  CVec3 b;
  Vec3 standard_error;  // per k: sqrt((var_re + var_im) / N_s)
};

inline CorrelationStats correlation_stats(const Dataset& data,
                                          const ProbeTriple& triple,
                                          const MaterialParams& p) {
  if (data.n_samples < 2)
    throw ValidationError("correlation_stats: need at least 2 samples");
  CorrelationStats out;
  const auto n = static_cast<double>(data.n_samples);
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<Complex> s(data.n_samples);
    Complex mean{};
    for (std::size_t j = 0; j < data.n_samples; ++j) {
      s[j] = boundary_functional(data, j, triple.pairs[k].u1, p) *
             boundary_functional(data, j, triple.pairs[k].u2, p);
      mean += s[j];
    }
    mean /= n;
    double var = 0.0;
    for (const Complex& v : s) var += std::norm(v - mean);
    var /= (n - 1.0);
    out.b[k] = mean;
    out.standard_error[k] = std::sqrt(var / n);
  }
  return out;
}

// Direct 3x3 solve of A x = b. The solution is the Fourier-transform triple
// evaluated at -xi.
inline CVec3 solve_point(const ProbeTriple& triple, const CVec3& b) {
  if (triple.flagged)
    throw NumericalError("solve_point: coefficient matrix flagged ill-conditioned");
  return solve3(triple.coeff, b);
}

// --- Fourier-domain field over the lattice ---------------------------------

struct SolveDiagnostics {
  double cond = 0.0;
  bool skipped = false;
};

struct FourierField {
  FrequencyLattice lattice;
  CVec3 origin_value{};           // sigma^2^ at xi = 0
  SolveDiagnostics origin_diag{};
  std::vector<CVec3> half_values;         // value at +h for each half point h
  std::vector<SolveDiagnostics> half_diag;
  std::size_t skipped_count = 0;

  // max over solved points of cond(A)/||A||_2 is tracked during assembly.
  double max_cond_over_norm = 0.0;
};

struct ReconstructOptions {
  int workers = 1;
  double cond_ceiling = 1e3;
  double theta = 0.0;
  // Block sizes tuned so one (point-block x sample-block) data tile stays
  // L2-resident while a chunk's probes sweep it.
  std::size_t xi_chunk = 32;
  std::size_t sample_block = 128;
  std::size_t point_block = 32;
};

namespace recon_detail {

// Sample-major planes of the dataset: [point][component][sample], split into
// real and imaginary parts for the vectorized sweeps.
struct DataPlanes {
  std::size_t n_obs = 0, n_samples = 0;
  std::vector<double> ur, ui, dur, dui;

  explicit DataPlanes(const Dataset& ds)
      : n_obs(ds.obs.size()), n_samples(ds.n_samples) {
    const std::size_t n = n_obs * 3 * n_samples;
    ur.resize(n);
    ui.resize(n);
    dur.resize(n);
    dui.resize(n);
    for (std::size_t j = 0; j < n_samples; ++j)
      for (std::size_t i = 0; i < n_obs; ++i) {
        const std::size_t q = (j * n_obs + i) * 3;
        for (std::size_t m = 0; m < 3; ++m) {
          const std::size_t plane_idx = (i * 3 + m) * n_samples + j;
          ur[plane_idx] = ds.u[q + m].real();
          ui[plane_idx] = ds.u[q + m].imag();
          dur[plane_idx] = ds.du[q + m].real();
          dui[plane_idx] = ds.du[q + m].imag();
        }
      }
  }
};

// Blocked evaluation of b_k for every triple in a chunk of lattice points.
// Association order: points ascending within ascending blocks, samples
// ascending, identical for any chunking.
inline void chunk_correlation(const DataPlanes& planes, const Dataset& ds,
                              const MaterialParams& p,
                              const std::vector<const ProbeTriple*>& triples,
                              const ReconstructOptions& opt, CVec3* b_out) {
  const std::size_t n_probes = triples.size() * 6;
  const std::size_t n_obs = planes.n_obs;
  const std::size_t n_samples = planes.n_samples;
  const std::size_t bj = std::max<std::size_t>(1, opt.sample_block);
  const std::size_t bi = std::max<std::size_t>(1, opt.point_block);

  // Per-probe phase coefficients at every observation point:
  //   ph = e^{i zeta . x_i},  cu = -i mu (zeta . nu_i) e^{i zeta . x_i}.
  std::vector<double> ph_re(n_probes * n_obs), ph_im(n_probes * n_obs);
  std::vector<double> cu_re(n_probes * n_obs), cu_im(n_probes * n_obs);
  std::vector<Vec3> etas(n_probes);
  for (std::size_t t = 0; t < triples.size(); ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t l = 0; l < 2; ++l) {
        const PlaneWaveProbe& probe =
            l == 0 ? triples[t]->pairs[k].u1 : triples[t]->pairs[k].u2;
        const std::size_t pi = (t * 3 + k) * 2 + l;
        etas[pi] = probe.eta();
        for (std::size_t i = 0; i < n_obs; ++i) {
          const Complex ph = std::exp(Complex(0.0, dot(probe.zeta(), ds.obs.point(i))));
          const Complex cu =
              Complex(0.0, -p.mu() * dot(probe.zeta(), ds.obs.normal(i))) * ph;
          ph_re[pi * n_obs + i] = ph.real();
          ph_im[pi * n_obs + i] = ph.imag();
          cu_re[pi * n_obs + i] = cu.real();
          cu_im[pi * n_obs + i] = cu.imag();
        }
      }
    }
  }

  std::vector<Complex> b_acc(triples.size() * 3, Complex{});
  std::vector<double> acc_re(n_probes * bj), acc_im(n_probes * bj);

  for (std::size_t j0 = 0; j0 < n_samples; j0 += bj) {
    const std::size_t nj = std::min(bj, n_samples - j0);
    std::fill(acc_re.begin(), acc_re.end(), 0.0);
    std::fill(acc_im.begin(), acc_im.end(), 0.0);

    for (std::size_t i0 = 0; i0 < n_obs; i0 += bi) {
      const std::size_t i1 = std::min(n_obs, i0 + bi);
      for (std::size_t pi = 0; pi < n_probes; ++pi) {
        const double e0 = etas[pi].x, e1 = etas[pi].y, e2 = etas[pi].z;
        double* __restrict arr = &acc_re[pi * bj];
        double* __restrict ari = &acc_im[pi * bj];
        for (std::size_t i = i0; i < i1; ++i) {
          const double pr = ph_re[pi * n_obs + i], pim = ph_im[pi * n_obs + i];
          const double cr = cu_re[pi * n_obs + i], cim = cu_im[pi * n_obs + i];
          const double* __restrict d0r = &planes.dur[(i * 3 + 0) * n_samples + j0];
          const double* __restrict d1r = &planes.dur[(i * 3 + 1) * n_samples + j0];
          const double* __restrict d2r = &planes.dur[(i * 3 + 2) * n_samples + j0];
          const double* __restrict d0i = &planes.dui[(i * 3 + 0) * n_samples + j0];
          const double* __restrict d1i = &planes.dui[(i * 3 + 1) * n_samples + j0];
          const double* __restrict d2i = &planes.dui[(i * 3 + 2) * n_samples + j0];
          const double* __restrict u0r = &planes.ur[(i * 3 + 0) * n_samples + j0];
          const double* __restrict u1r = &planes.ur[(i * 3 + 1) * n_samples + j0];
          const double* __restrict u2r = &planes.ur[(i * 3 + 2) * n_samples + j0];
          const double* __restrict u0i = &planes.ui[(i * 3 + 0) * n_samples + j0];
          const double* __restrict u1i = &planes.ui[(i * 3 + 1) * n_samples + j0];
          const double* __restrict u2i = &planes.ui[(i * 3 + 2) * n_samples + j0];
          for (std::size_t j = 0; j < nj; ++j) {
            const double tr = e0 * d0r[j] + e1 * d1r[j] + e2 * d2r[j];
            const double ti = e0 * d0i[j] + e1 * d1i[j] + e2 * d2i[j];
            const double sr = e0 * u0r[j] + e1 * u1r[j] + e2 * u2r[j];
            const double si = e0 * u0i[j] + e1 * u1i[j] + e2 * u2i[j];
            arr[j] += pr * tr - pim * ti + cr * sr - cim * si;
            ari[j] += pr * ti + pim * tr + cr * si + cim * sr;
          }
        }
      }
    }

    // Pair products for this sample block, samples ascending.
    for (std::size_t t = 0; t < triples.size(); ++t) {
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t p1 = (t * 3 + k) * 2;
        const std::size_t p2 = p1 + 1;
        Complex acc{};
        const double* a1r = &acc_re[p1 * bj];
        const double* a1i = &acc_im[p1 * bj];
        const double* a2r = &acc_re[p2 * bj];
        const double* a2i = &acc_im[p2 * bj];
        for (std::size_t j = 0; j < nj; ++j)
          acc += Complex(a1r[j] * a2r[j] - a1i[j] * a2i[j],
                         a1r[j] * a2i[j] + a1i[j] * a2r[j]);
        b_acc[t * 3 + k] += acc;
      }
    }
  }

  const double w = ds.obs.weight();
  const double scale = w * w / static_cast<double>(n_samples);
  for (std::size_t t = 0; t < triples.size(); ++t)
    for (std::size_t k = 0; k < 3; ++k)
      b_out[t][k] = scale * b_acc[t * 3 + k];
}

}  // namespace recon_detail

// Assembles the Fourier-domain data over the whole lattice: per half point,
// probe design, correlation data, and the 3x3 solve (stored at -xi, then
// mirrored by conjugation). Flagged points contribute zero and are counted.
inline FourierField assemble_correlation(const Dataset& data,
                                         const FrequencyLattice& lattice,
                                         const MaterialParams& p,
                                         const ReconstructOptions& opt = {}) {
  if (data.n_samples == 0)
    throw ValidationError("assemble_correlation: empty dataset");

  const recon_detail::DataPlanes planes(data);

  FourierField field{lattice};
  const std::size_t n_half = lattice.half_points().size();
  field.half_values.assign(n_half, CVec3{});
  field.half_diag.assign(n_half, SolveDiagnostics{});

  // Work item 0 is the origin; item q >= 1 is half point q-1.
  const std::size_t n_items = n_half + 1;
  const std::size_t chunk = std::max<std::size_t>(1, opt.xi_chunk);
  const std::size_t n_chunks = chunk_count(n_items, chunk);

  std::vector<SolveDiagnostics> diag(n_items);
  std::vector<CVec3> solved(n_items);
  std::vector<double> cond_over_norm(n_items, 0.0);

  parallel_chunks(n_chunks, opt.workers, [&](std::size_t c) {
    const std::size_t q0 = c * chunk;
    const std::size_t q1 = std::min(n_items, q0 + chunk);

    std::vector<ProbeTriple> triples;
    std::vector<const ProbeTriple*> active;
    std::vector<std::size_t> active_items;
    triples.reserve(q1 - q0);
    for (std::size_t q = q0; q < q1; ++q) {
      const Vec3 xi = q == 0 ? Vec3{}
                             : lattice.xi(lattice.half_points()[q - 1]);
      ProbeTriple t = design_triple(xi, p, opt.cond_ceiling, opt.theta);
      diag[q].cond = t.cond;
      diag[q].skipped = t.flagged;
      if (!t.flagged) {
        if (t.norm > 0.0) cond_over_norm[q] = t.cond / t.norm;
        triples.push_back(std::move(t));
        active_items.push_back(q);
      }
    }
    active.reserve(triples.size());
    for (const auto& t : triples) active.push_back(&t);
    if (active.empty()) return;

    std::vector<CVec3> b(active.size());
    recon_detail::chunk_correlation(planes, data, p, active, opt, b.data());
    for (std::size_t a = 0; a < active.size(); ++a)
      solved[active_items[a]] = solve3(active[a]->coeff, b[a]);
  });

  field.origin_diag = diag[0];
  if (!diag[0].skipped) {
    field.origin_value = solved[0];  // value at -0 == value at 0
  }
  for (std::size_t h = 0; h < n_half; ++h) {
    field.half_diag[h] = diag[h + 1];
    if (!diag[h + 1].skipped) {
      // solve at +h yields the transform at -h; the value at +h follows by
      // Hermitian symmetry of the real field.
      const CVec3& at_minus = solved[h + 1];
      field.half_values[h] = {std::conj(at_minus.x), std::conj(at_minus.y),
                              std::conj(at_minus.z)};
    }
  }
  std::size_t skipped = 0;
  for (const auto& d : diag)
    if (d.skipped) ++skipped;
  field.skipped_count = skipped;

  double worst = 0.0;
  for (double r : cond_over_norm) worst = std::max(worst, r);
  field.max_cond_over_norm = worst;
  return field;
}

// --- Synthesis --------------------------------------------------------------

struct VarianceField {
  SourceGrid grid;
  std::array<std::vector<double>, 3> raw;      // sigma_j^2, may dip below zero
  std::array<std::vector<double>, 3> clamped;  // max(raw, 0)
  double max_imag_residue = 0.0;               // relative to the field scale
  std::size_t skipped_points = 0;
};

namespace recon_detail {

// Separable evaluation of the inverse transform on a product grid
// xs x ys x zs, restricted to lattice points with |xi| <= cutoff.
// Output layout: [component][ix][iy][iz], x slowest.
struct AxesSynthesis {
  std::array<std::vector<double>, 3> raw;
  double max_abs_im = 0.0;
  double max_abs_re = 0.0;
};

inline AxesSynthesis synthesize_axes(const FourierField& field,
                                     const std::vector<double>& xs,
                                     const std::vector<double>& ys,
                                     const std::vector<double>& zs, double cutoff) {
  const FrequencyLattice& lat = field.lattice;
  const int nmax = lat.max_index();
  const int dim = 2 * nmax + 1;
  const double dxi = lat.dxi();
  const double cutoff_sq = cutoff * cutoff * (1.0 + 1e-12);

  // Dense cube of Fourier values (zero outside the ball / above the cutoff).
  const auto at = [&](int nx, int ny, int nz) {
    return static_cast<std::size_t>(((nx + nmax) * dim + (ny + nmax)) * dim +
                                    (nz + nmax));
  };
  std::vector<Complex> cube(3 * static_cast<std::size_t>(dim) * dim * dim, Complex{});
  const std::size_t comp_stride = static_cast<std::size_t>(dim) * dim * dim;

  // Hermitian symmetrization: the origin value is made real; its imaginary
  // part is reported through max_abs_im.
  double origin_im = 0.0;
  for (std::size_t m = 0; m < 3; ++m) {
    origin_im = std::max(origin_im, std::abs(field.origin_value[m].imag()));
    cube[m * comp_stride + at(0, 0, 0)] = Complex(field.origin_value[m].real(), 0.0);
  }

  const auto& half = lat.half_points();
  for (std::size_t h = 0; h < half.size(); ++h) {
    if (field.half_diag[h].skipped) continue;
    const LatticePoint& q = half[h];
    const double r2 =
        (double(q.nx) * q.nx + double(q.ny) * q.ny + double(q.nz) * q.nz) * dxi * dxi;
    if (r2 > cutoff_sq) continue;
    for (std::size_t m = 0; m < 3; ++m) {
      cube[m * comp_stride + at(q.nx, q.ny, q.nz)] = field.half_values[h][m];
      cube[m * comp_stride + at(-q.nx, -q.ny, -q.nz)] =
          std::conj(field.half_values[h][m]);
    }
  }

  auto phase_table = [&](const std::vector<double>& coords) {
    std::vector<Complex> table(coords.size() * static_cast<std::size_t>(dim));
    for (std::size_t c = 0; c < coords.size(); ++c)
      for (int n = -nmax; n <= nmax; ++n)
        table[c * dim + static_cast<std::size_t>(n + nmax)] =
            std::exp(Complex(0.0, dxi * n * coords[c]));
    return table;
  };
  const auto px = phase_table(xs);
  const auto py = phase_table(ys);
  const auto pz = phase_table(zs);

  const std::size_t nx = xs.size(), ny = ys.size(), nz = zs.size();
  AxesSynthesis out;
  const double scale = dxi * dxi * dxi / std::pow(2.0 * M_PI, 3);

  std::vector<Complex> t1(static_cast<std::size_t>(dim) * dim * nz);
  std::vector<Complex> t2(static_cast<std::size_t>(dim) * ny * nz);
  for (std::size_t m = 0; m < 3; ++m) {
    const Complex* cm = &cube[m * comp_stride];
    // Sum over n3 for each (n1, n2, z).
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        const Complex* row = &cm[(static_cast<std::size_t>(a) * dim + b) * dim];
        for (std::size_t c = 0; c < nz; ++c) {
          Complex acc{};
          const Complex* ph = &pz[c * dim];
          for (int n = 0; n < dim; ++n) acc += row[n] * ph[n];
          t1[(static_cast<std::size_t>(a) * dim + b) * nz + c] = acc;
        }
      }
    // Sum over n2.
    for (int a = 0; a < dim; ++a)
      for (std::size_t yb = 0; yb < ny; ++yb)
        for (std::size_t c = 0; c < nz; ++c) {
          Complex acc{};
          for (int n = 0; n < dim; ++n)
            acc += t1[(static_cast<std::size_t>(a) * dim + n) * nz + c] *
                   py[yb * dim + static_cast<std::size_t>(n)];
          t2[(static_cast<std::size_t>(a) * ny + yb) * nz + c] = acc;
        }
    // Sum over n1.
    out.raw[m].resize(nx * ny * nz);
    for (std::size_t xa = 0; xa < nx; ++xa)
      for (std::size_t yb = 0; yb < ny; ++yb)
        for (std::size_t c = 0; c < nz; ++c) {
          Complex acc{};
          for (int n = 0; n < dim; ++n)
            acc += t2[(static_cast<std::size_t>(n) * ny + yb) * nz + c] *
                   px[xa * dim + static_cast<std::size_t>(n)];
          acc *= scale;
          out.raw[m][(xa * ny + yb) * nz + c] = acc.real();
          out.max_abs_im = std::max(out.max_abs_im, std::abs(acc.imag()));
          out.max_abs_re = std::max(out.max_abs_re, std::abs(acc.real()));
        }
  }
  out.max_abs_im = std::max(out.max_abs_im, origin_im * scale);
  return out;
}

}  // namespace recon_detail

// Direct (unfactored) evaluation of the synthesis sum at one point; the
// reference that the separable path is tested against.
inline std::array<Complex, 3> synthesize_direct(const FourierField& field,
                                                const Vec3& x, double cutoff) {
  const FrequencyLattice& lat = field.lattice;
  const double scale = std::pow(lat.dxi(), 3) / std::pow(2.0 * M_PI, 3);
  const double cutoff_sq = cutoff * cutoff * (1.0 + 1e-12);
  std::array<Complex, 3> acc{};
  for (std::size_t m = 0; m < 3; ++m)
    acc[m] = Complex(field.origin_value[m].real(), 0.0);
  const auto& half = lat.half_points();
  for (std::size_t h = 0; h < half.size(); ++h) {
    if (field.half_diag[h].skipped) continue;
    const Vec3 xi = lat.xi(half[h]);
    if (norm2_sq(xi) > cutoff_sq) continue;
    const Complex e = std::exp(Complex(0.0, dot(xi, x)));
    for (std::size_t m = 0; m < 3; ++m) {
      const Complex v = field.half_values[h][m];
      acc[m] += v * e + std::conj(v * e);
    }
  }
  for (auto& a : acc) a *= scale;
  return acc;
}

inline std::vector<double> grid_axis_centers(const SourceGrid& grid, int axis) {
  std::vector<double> out(static_cast<std::size_t>(grid.count(axis)));
  for (int i = 0; i < grid.count(axis); ++i) {
    const double lo = grid.box().lo[static_cast<std::size_t>(axis)];
    out[static_cast<std::size_t>(i)] =
        lo + (i + 0.5) * grid.step()[static_cast<std::size_t>(axis)];
  }
  return out;
}

// Synthesis over the cells of an evaluation grid. The linear cell order of
// the output matches SourceGrid::center(t) (x fastest).
inline VarianceField synthesize_on_grid(const FourierField& field,
                                        const SourceGrid& grid, double cutoff) {
  const auto xs = grid_axis_centers(grid, 0);
  const auto ys = grid_axis_centers(grid, 1);
  const auto zs = grid_axis_centers(grid, 2);
  const auto syn = recon_detail::synthesize_axes(field, xs, ys, zs, cutoff);

  VarianceField out{grid};
  const std::size_t nx = xs.size(), ny = ys.size(), nz = zs.size();
  for (std::size_t m = 0; m < 3; ++m) {
    out.raw[m].resize(nx * ny * nz);
    out.clamped[m].resize(nx * ny * nz);
    for (std::size_t xa = 0; xa < nx; ++xa)
      for (std::size_t yb = 0; yb < ny; ++yb)
        for (std::size_t c = 0; c < nz; ++c) {
          // synthesize_axes is x-slowest; grid cells are x-fastest.
          const double v = syn.raw[m][(xa * ny + yb) * nz + c];
          const std::size_t cell = (c * ny + yb) * nx + xa;
          out.raw[m][cell] = v;
          out.clamped[m][cell] = std::max(v, 0.0);
        }
  }
  out.max_imag_residue =
      syn.max_abs_re > 0.0 ? syn.max_abs_im / syn.max_abs_re : syn.max_abs_im;
  out.skipped_points = field.skipped_count;
  return out;
}

struct ReconstructResult {
  VarianceField field;
  FourierField fourier;
};

// Algorithm entry point: lattice construction, correlation assembly, per-xi
// solves, and truncated inverse-transform synthesis on the evaluation grid.
inline ReconstructResult reconstruct_variance(const Dataset& data,
                                              const MaterialParams& p, double beta,
                                              double dxi, const SourceGrid& eval_grid,
                                              const ReconstructOptions& opt = {}) {
  if (!(beta > 0.0 && beta < 2.0))
    throw ValidationError("reconstruct_variance: beta must lie in (0, 2)");
  const Vec3 side = eval_grid.box().side();
  const double l_half = 0.5 * std::max(side.x, std::max(side.y, side.z));
  if (dxi > M_PI / l_half * (1.0 + 1e-12))
    throw ValidationError(
        "reconstruct_variance: dxi too coarse; synthesis would alias over the "
        "evaluation box (need dxi <= pi / half-width)");

  const FrequencyLattice lattice = build_lattice(beta, dxi, p);
  FourierField fourier = assemble_correlation(data, lattice, p, opt);
  VarianceField field = synthesize_on_grid(fourier, eval_grid, lattice.xi_max());
  return ReconstructResult{std::move(field), std::move(fourier)};
}

}  // namespace ersi
