#include <doctest.h>

#include <cmath>

#include "ersi/analysis.hpp"
#include "ersi/forward.hpp"
#include "ersi/lattice.hpp"
#include "ersi/reconstruct.hpp"
#include "test_support.hpp"

using namespace ersi;
using namespace ersi::test;

namespace {

const MaterialParams kMat(2.0, 1.0, 4.0);  // kappa_s = 4

Dataset small_dataset(std::size_t n_samples = 24, std::uint64_t seed = 3,
                      std::size_t n_obs = 64, double h = 0.25) {
  const ObservationSet obs = fibonacci_sphere(n_obs, 2.0);
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, h);
  return simulate(grid, builtin_profile("paper3d"), kMat, obs, n_samples, seed);
}

Dataset zero_dataset(std::size_t n_samples, std::size_t n_obs) {
  const ObservationSet obs = fibonacci_sphere(n_obs, 2.0);
  Dataset ds(kMat, obs);
  ds.n_samples = n_samples;
  ds.u.assign(n_samples * n_obs * 3, Complex{});
  ds.du.assign(n_samples * n_obs * 3, Complex{});
  return ds;
}

}  // namespace

TEST_CASE("boundary_functional basics") {
  SUBCASE("zero dataset gives zero") {
    const Dataset ds = zero_dataset(3, 32);
    const ProbePair pair = design_pair(Vec3{1.0, 0.5, -0.3}, 0, kMat);
    CHECK(boundary_functional(ds, 0, pair.u1, kMat) == Complex{});
  }

  SUBCASE("sample index out of range") {
    const Dataset ds = zero_dataset(3, 32);
    const ProbePair pair = design_pair(Vec3{1.0, 0.5, -0.3}, 0, kMat);
    CHECK_THROWS_AS((void)boundary_functional(ds, 3, pair.u1, kMat), ValidationError);
  }

  SUBCASE("linearity in the data") {
    Dataset ds = small_dataset(2);
    const ProbePair pair = design_pair(Vec3{0.7, -0.4, 1.1}, 1, kMat);
    const Complex base = boundary_functional(ds, 1, pair.u1, kMat);
    const Complex c(1.7, -0.6);
    for (auto& v : ds.u) v *= c;
    for (auto& v : ds.du) v *= c;
    const Complex scaled = boundary_functional(ds, 1, pair.u1, kMat);
    CHECK(std::abs(scaled - c * base) <= 1e-12 * std::abs(scaled));
  }
}

TEST_CASE("correlation_rhs basics") {
  SUBCASE("zero dataset") {
    const Dataset ds = zero_dataset(4, 32);
    const ProbeTriple t = design_triple(Vec3{0.5, 0.5, 0.0}, kMat);
    const CVec3 b = correlation_rhs(ds, t, kMat);
    CHECK(b.x == Complex{});
    CHECK(b.y == Complex{});
    CHECK(b.z == Complex{});
  }

  SUBCASE("empty dataset rejected") {
    const Dataset ds = zero_dataset(0, 32);
    const ProbeTriple t = design_triple(Vec3{0.5, 0.5, 0.0}, kMat);
    CHECK_THROWS_AS((void)correlation_rhs(ds, t, kMat), ValidationError);
  }

  SUBCASE("a single sample is returned without averaging") {
    const Dataset ds = small_dataset(1);
    const ProbeTriple t = design_triple(Vec3{1.0, 0.0, 0.5}, kMat);
    const CVec3 b = correlation_rhs(ds, t, kMat);
    for (std::size_t k = 0; k < 3; ++k) {
      const Complex s1 = boundary_functional(ds, 0, t.pairs[k].u1, kMat) *
                         boundary_functional(ds, 0, t.pairs[k].u2, kMat);
      CHECK(std::abs(b[k] - s1) <= 1e-14 * std::abs(s1));
    }
  }
}

TEST_CASE("correlation data matches the discrete transform oracle") {
  // Noiseless reduced-scale check of b_k = A_k . sigma^2^(-xi) within
  // 3 Monte Carlo standard errors.
  const std::size_t n_samples = 400;
  const ObservationSet obs = fibonacci_sphere(1024, 2.0);
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 0.1);
  const VarianceProfile profile = builtin_profile("paper3d");
  const Dataset ds = simulate(grid, profile, kMat, obs, n_samples, 21);

  for (const Vec3& xi : {Vec3{0.5, 0.0, 0.0}, Vec3{1.0, -1.0, 0.5}, Vec3{0, 0, 0}}) {
    const ProbeTriple t = design_triple(xi, kMat);
    const CorrelationStats stats = correlation_stats(ds, t, kMat);
    const CVec3 truth = discrete_profile_transform(grid, profile, -1.0 * xi);
    for (std::size_t k = 0; k < 3; ++k) {
      Complex want{};
      for (std::size_t m = 0; m < 3; ++m) want += t.coeff(k, m) * truth[m];
      // Allow a little extra for the surface quadrature error.
      const double tol = 3.0 * stats.standard_error[k] + 0.02 * std::abs(want);
      CHECK(std::abs(stats.b[k] - want) <= tol);
    }
  }
}

TEST_CASE("solve_point") {
  SUBCASE("identity matrix returns the data") {
    ProbeTriple t = design_triple(Vec3{}, kMat);  // A = I at the origin
    const CVec3 b{Complex(1, 0), Complex(0, 2), Complex(-1, 0)};
    const CVec3 x = solve_point(t, b);
    CHECK(std::abs(x.x - b.x) < 1e-14);
    CHECK(std::abs(x.y - b.y) < 1e-14);
    CHECK(std::abs(x.z - b.z) < 1e-14);
  }

  SUBCASE("residual of the direct solve") {
    for (std::uint32_t it = 0; it < 200; ++it) {
      const Vec3 xi = random_unit(501, it) * (1.5 * std::abs(urand(502, it, 0)) *
                                              kMat.kappa_s());
      const ProbeTriple t = design_triple(xi, kMat);
      const CVec3 b{Complex(urand(503, it, 0), urand(503, it, 1)),
                    Complex(urand(503, it, 2), urand(504, it, 0)),
                    Complex(urand(504, it, 1), urand(504, it, 2))};
      const CVec3 x = solve_point(t, b);
      CVec3 residual;
      for (std::size_t r = 0; r < 3; ++r) {
        residual[r] = -b[r];
        for (std::size_t c = 0; c < 3; ++c) residual[r] += t.coeff(r, c) * x[c];
      }
      CHECK(norm2(residual) <= 1e-12 * norm2(b));
    }
  }

  SUBCASE("perturbation bound via the condition number") {
    for (std::uint32_t it = 0; it < 100; ++it) {
      const Vec3 xi = random_unit(511, it) * (1.2 * kMat.kappa_s());
      const ProbeTriple t = design_triple(xi, kMat);
      const CVec3 b{Complex(urand(512, it, 0), 0), Complex(urand(512, it, 1), 0),
                    Complex(urand(512, it, 2), 0)};
      const CVec3 db{Complex(1e-4 * urand(513, it, 0), 1e-4 * urand(513, it, 1)),
                     Complex(1e-4 * urand(513, it, 2), 0),
                     Complex(0, 1e-4 * urand(514, it, 0))};
      const CVec3 x0 = solve_point(t, b);
      const CVec3 x1 = solve_point(t, b + db);
      const double amplification = t.cond / t.norm;
      CHECK(norm2(x1 - x0) <= amplification * norm2(db) * (1.0 + 1e-10));
    }
  }

  SUBCASE("flagged triple is refused") {
    const Vec3 xi = Vec3{1.0, 0.0, 0.0} * (1.9999 * kMat.kappa_s());
    const ProbeTriple t = design_triple(xi, kMat, 2.0);
    REQUIRE(t.flagged);
    CHECK_THROWS_AS((void)solve_point(t, CVec3{}), NumericalError);
  }
}

TEST_CASE("build_lattice") {
  SUBCASE("count matches the ball volume at the paper scale") {
    // beta kappa_s = 14, dxi = 0.5: about (4/3) pi (14/0.5)^3 points.
    const MaterialParams paper(2.0, 1.0, 16.0);
    const FrequencyLattice lat = build_lattice(14.0 / paper.kappa_s(), 0.5, paper);
    const double expected = 4.0 / 3.0 * M_PI * std::pow(14.0 / 0.5, 3);
    const auto count = static_cast<double>(lat.full_size());
    CHECK(std::abs(count - expected) <= 0.05 * expected);
    CHECK(lat.full_size() == 2 * lat.half_points().size() + 1);
  }

  SUBCASE("coarse spacing keeps only the origin") {
    const FrequencyLattice lat = build_lattice(0.5, 2.0 * 0.5 * kMat.kappa_s() + 1.0,
                                               kMat);
    CHECK(lat.half_points().empty());
    CHECK(lat.full_size() == 1);
  }

  SUBCASE("all points inside the ball; half-lattice is a strict half") {
    const FrequencyLattice lat = build_lattice(0.9, 0.7, kMat);
    for (const auto& q : lat.half_points()) {
      CHECK(norm2(lat.xi(q)) <= lat.xi_max() * (1.0 + 1e-12));
      const bool positive = q.nz > 0 || (q.nz == 0 && q.ny > 0) ||
                            (q.nz == 0 && q.ny == 0 && q.nx > 0);
      CHECK(positive);
    }
  }

  SUBCASE("range errors") {
    CHECK_THROWS_AS((void)build_lattice(0.0, 0.5, kMat), ValidationError);
    CHECK_THROWS_AS((void)build_lattice(2.0, 0.5, kMat), ValidationError);
    CHECK_THROWS_AS((void)build_lattice(1.0, 0.0, kMat), ValidationError);
  }
}

TEST_CASE("fast correlation assembly matches the reference path") {
  const Dataset ds = small_dataset(30, 5, 96, 0.25);
  const FrequencyLattice lat = build_lattice(0.6, 1.2, kMat);
  REQUIRE(lat.half_points().size() >= 4);

  ReconstructOptions opt;
  opt.xi_chunk = 3;        // force several chunks
  opt.sample_block = 7;    // odd blocking
  opt.point_block = 13;
  const FourierField field = assemble_correlation(ds, lat, kMat, opt);

  // Reference: solve independently per point.
  {
    const ProbeTriple t = design_triple(Vec3{}, kMat);
    const CVec3 b = correlation_rhs(ds, t, kMat);
    const CVec3 want = solve_point(t, b);
    for (std::size_t m = 0; m < 3; ++m)
      CHECK(std::abs(field.origin_value[m] - want[m]) <=
            1e-12 * std::max(1.0, std::abs(want[m])));
  }
  for (std::size_t h = 0; h < lat.half_points().size(); ++h) {
    const Vec3 xi = lat.xi(lat.half_points()[h]);
    const ProbeTriple t = design_triple(xi, kMat);
    const CVec3 b = correlation_rhs(ds, t, kMat);
    const CVec3 at_minus = solve_point(t, b);
    for (std::size_t m = 0; m < 3; ++m) {
      const Complex want = std::conj(at_minus[m]);  // stored at +xi
      CHECK(std::abs(field.half_values[h][m] - want) <=
            1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("assembly is independent of the worker count") {
  const Dataset ds = small_dataset(16, 9, 64, 0.25);
  const FrequencyLattice lat = build_lattice(0.7, 1.0, kMat);
  ReconstructOptions one, many;
  one.workers = 1;
  many.workers = 8;
  many.xi_chunk = 2;
  const FourierField a = assemble_correlation(ds, lat, kMat, one);
  const FourierField b = assemble_correlation(ds, lat, kMat, many);
  for (std::size_t m = 0; m < 3; ++m)
    CHECK(a.origin_value[m] == b.origin_value[m]);
  for (std::size_t h = 0; h < lat.half_points().size(); ++h)
    for (std::size_t m = 0; m < 3; ++m)
      CHECK(a.half_values[h][m] == b.half_values[h][m]);
}

TEST_CASE("Hermitian consistency of independent +xi / -xi solves") {
  const Dataset ds = small_dataset(400, 13, 128, 0.2);
  const Vec3 xi{1.0, 0.5, -0.5};

  const ProbeTriple tp = design_triple(xi, kMat);
  const ProbeTriple tm = design_triple(-1.0 * xi, kMat);
  const CorrelationStats sp = correlation_stats(ds, tp, kMat);
  const CorrelationStats sm = correlation_stats(ds, tm, kMat);
  const CVec3 xp = solve_point(tp, sp.b);  // sigma^2^ at -xi
  const CVec3 xm = solve_point(tm, sm.b);  // sigma^2^ at +xi

  // Solve-amplified Monte Carlo tolerance.
  const double amp = tp.cond / tp.norm;
  const double se = amp * 3.0 *
                    std::max({sp.standard_error.x, sp.standard_error.y,
                              sp.standard_error.z, sm.standard_error.x,
                              sm.standard_error.y, sm.standard_error.z});
  for (std::size_t m = 0; m < 3; ++m)
    CHECK(std::abs(xp[m] - std::conj(xm[m])) <= se);
}

TEST_CASE("separable synthesis equals the direct sum") {
  // Random Hermitian data on a small lattice.
  const FrequencyLattice lat = build_lattice(0.8, 0.9, kMat);
  FourierField field{lat};
  field.half_values.resize(lat.half_points().size());
  field.half_diag.resize(lat.half_points().size());
  for (std::size_t m = 0; m < 3; ++m)
    field.origin_value[m] = Complex(urand(601, 0, static_cast<std::uint32_t>(m)), 0);
  for (std::size_t h = 0; h < lat.half_points().size(); ++h)
    for (std::size_t m = 0; m < 3; ++m)
      field.half_values[h][m] =
          Complex(urand(602, static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(m)),
                  urand(603, static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(m)));

  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 0.4);
  const VarianceField vf = synthesize_on_grid(field, grid, lat.xi_max());

  double worst = 0.0;
  for (std::size_t t = 0; t < grid.num_cells(); ++t) {
    const auto direct = synthesize_direct(field, grid.center(t), lat.xi_max());
    for (std::size_t m = 0; m < 3; ++m) {
      worst = std::max(worst, std::abs(vf.raw[m][t] - direct[m].real()));
      CHECK(std::abs(direct[m].imag()) < 1e-12);
      CHECK(vf.clamped[m][t] == std::max(vf.raw[m][t], 0.0));
    }
  }
  CHECK(worst <= 1e-9);
  CHECK(vf.max_imag_residue < 1e-9);
}

TEST_CASE("reconstruct_variance on a zero dataset is identically zero") {
  const Dataset ds = zero_dataset(4, 64);
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 0.5);
  const ReconstructResult rec = reconstruct_variance(ds, kMat, 0.8, 1.0, grid);
  for (std::size_t m = 0; m < 3; ++m)
    for (double v : rec.field.raw[m]) CHECK(v == 0.0);
  CHECK(rec.field.skipped_points == 0);
}

TEST_CASE("aliasing guard on the lattice spacing") {
  const Dataset ds = zero_dataset(2, 32);
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 0.5);
  CHECK_THROWS_AS(
      (void)reconstruct_variance(ds, kMat, 0.9, M_PI + 0.2, grid),
      ValidationError);
  CHECK_THROWS_AS((void)reconstruct_variance(ds, kMat, 2.3, 0.5, grid),
                  ValidationError);
}

TEST_CASE("sample variance of the correlation summands is bounded") {
  // Var(s) <= 2 (h^3 sum_t sum_m sigma_m^2)^2, with 10% Monte Carlo slack.
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 0.2);
  const VarianceProfile profile = builtin_profile("paper3d");
  const ObservationSet obs = fibonacci_sphere(512, 2.0);
  const std::size_t n_samples = 500;
  const Dataset ds = simulate(grid, profile, kMat, obs, n_samples, 29);

  double sigma_total = 0.0;
  for (std::size_t t = 0; t < grid.num_cells(); ++t)
    for (int m = 0; m < 3; ++m)
      sigma_total += profile.sigma_sq(m, grid.center(t));
  sigma_total *= grid.cell_volume();
  const double bound = 2.0 * sigma_total * sigma_total * 1.1;

  for (const Vec3& xi : {Vec3{0.5, 0.5, 0.0}, Vec3{1.5, -0.5, 1.0}}) {
    const ProbeTriple t = design_triple(xi, kMat);
    const CorrelationStats stats = correlation_stats(ds, t, kMat);
    for (std::size_t k = 0; k < 3; ++k) {
      const double sample_var = stats.standard_error[k] * stats.standard_error[k] *
                                static_cast<double>(n_samples);
      CHECK(sample_var <= bound);
    }
  }
}

TEST_CASE("reconstruction preserves spatial orientation") {
  // An off-center bump distinguishes sigma^2(x) from sigma^2(-x); the three
  // builtin profiles are centrally symmetric and cannot see a mirrored
  // Fourier storage convention.
  VarianceProfile bump;
  bump.support = Box3{{-1, -1, -1}, {1, 1, 1}};
  const Vec3 center{0.3, 0.0, 0.0};
  auto field_fn = [center](const Vec3& x) {
    return std::exp(-8.0 * norm2_sq(x - center));
  };
  bump.sigma_field[0] = field_fn;
  bump.sigma_field[1] = field_fn;
  bump.sigma_field[2] = field_fn;

  const MaterialParams p(2.0, 1.0, 6.0);
  const ObservationSet obs = fibonacci_sphere(512, 2.0);
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 1.0 / 6.0);
  const Dataset ds = simulate(grid, bump, p, obs, 500, 77);

  const ReconstructResult rec = reconstruct_variance(ds, p, 1.2, 0.8, grid);

  VarianceProfile mirrored = bump;
  auto mirror_fn = [field_fn](const Vec3& x) { return field_fn(-1.0 * x); };
  mirrored.sigma_field[0] = mirror_fn;
  mirrored.sigma_field[1] = mirror_fn;
  mirrored.sigma_field[2] = mirror_fn;

  // The narrow bump keeps substantial energy above the cutoff, so the
  // truncation error is sizable; orientation is what the ratio pins down.
  const double err_true = l2_relative_error(rec.field, bump).mean_err;
  const double err_mirror = l2_relative_error(rec.field, mirrored).mean_err;
  CHECK(err_true < 0.65);
  CHECK(err_mirror > 0.7);
  CHECK(err_true < 0.5 * err_mirror);
}

TEST_CASE("oracle-fed truncation error decreases from beta 0.5 to 1.0") {
  // Single-Gaussian profile, exact Fourier data: the only error is the
  // high-frequency truncation, which shrinks as the cutoff grows.
  VarianceProfile gauss;
  gauss.support = Box3{{-1, -1, -1}, {1, 1, 1}};
  gauss.sigma_field[0] = [](const Vec3& x) { return std::exp(-2.0 * norm2_sq(x)); };
  gauss.sigma_field[1] = gauss.sigma_field[0];
  gauss.sigma_field[2] = gauss.sigma_field[0];

  const MaterialParams p(2.0, 1.0, 8.0);
  const SourceGrid grid = build_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 0.1);

  double previous = 1e300;
  for (double beta : {0.5, 0.75, 1.0}) {
    const FrequencyLattice lat = build_lattice(beta, 0.5, p);
    const FourierField oracle = oracle_fourier_field(grid, gauss, lat);
    const VarianceField field = synthesize_on_grid(oracle, grid, lat.xi_max());
    const ErrorReport rep = l2_relative_error(field, gauss);
    CHECK(rep.mean_err < previous);
    previous = rep.mean_err;
  }
  CHECK(previous < 0.05);
}
