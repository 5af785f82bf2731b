#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ersi/observation.hpp"
#include "ersi/probes.hpp"
#include "test_support.hpp"

using namespace ersi;
using namespace ersi::test;

namespace {
const MaterialParams kMat(2.0, 1.0, 8.0);  // kappa_s = 8

Vec3 random_inband_xi(std::uint32_t it, double max_frac = 1.99) {
  Vec3 dir = random_unit(401, it);
  const double r = max_frac * kMat.kappa_s() * std::abs(urand(402, it, 0));
  return dir * r;
}
}  // namespace

TEST_CASE("design_pair: axis-aligned and degenerate cases") {
  const double ks = kMat.kappa_s();

  SUBCASE("xi along the pair axis (degenerate): diagonal entry formula") {
    const Vec3 xi{0.6 * ks, 0.0, 0.0};
    const ProbePair pair = design_pair(xi, 0, kMat);
    const double a11 = pair.u1.eta().x * pair.u2.eta().x;
    CHECK(a11 == doctest::Approx(1.0 - norm2_sq(xi) / (4.0 * ks * ks)).epsilon(1e-14));
  }

  SUBCASE("xi = (0,0,r): alpha of the first pair is (0,-1,0)") {
    const ProbePair pair = design_pair(Vec3{0.0, 0.0, 3.0}, 0, kMat);
    CHECK(pair.alpha.x == doctest::Approx(0.0));
    CHECK(pair.alpha.y == doctest::Approx(-1.0));
    CHECK(pair.alpha.z == doctest::Approx(0.0));
  }

  SUBCASE("xi = 0: opposite zetas, unit Fourier factor") {
    for (int k = 0; k < 3; ++k) {
      const ProbePair pair = design_pair(Vec3{}, k, kMat);
      const Vec3 sum = pair.u1.zeta() + pair.u2.zeta();
      CHECK(norm2(sum) == doctest::Approx(0.0));
      const Vec3 x{0.3, -0.7, 0.2};
      const Complex prod = std::exp(Complex(0.0, dot(pair.u1.zeta(), x))) *
                           std::exp(Complex(0.0, dot(pair.u2.zeta(), x)));
      CHECK(prod.real() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(prod.imag()) < 1e-14);
    }
  }

  SUBCASE("out of band") {
    CHECK_THROWS_AS((void)design_pair(Vec3{2.0 * ks, 0.0, 0.0}, 0, kMat),
                    OutOfBandError);
    CHECK_THROWS_AS((void)design_pair(Vec3{3.0 * ks, 0.0, 0.0}, 1, kMat),
                    OutOfBandError);
  }
}

TEST_CASE("probe invariants hold for 10^4 random frequency points") {
  const double ks = kMat.kappa_s();
  for (std::uint32_t it = 0; it < 10000; ++it) {
    const Vec3 xi = random_inband_xi(it);
    const int k = static_cast<int>(it % 3);
    const ProbePair pair = design_pair(xi, k, kMat);
    for (const PlaneWaveProbe* probe : {&pair.u1, &pair.u2}) {
      CHECK(std::abs(dot(probe->eta(), probe->zeta())) <= 1e-10 * ks);
      CHECK(std::abs(norm2(probe->zeta()) - ks) <= 1e-10 * ks);
      CHECK(std::abs(norm2(probe->eta()) - 1.0) <= 1e-10);
    }
    const Vec3 sum = pair.u1.zeta() + pair.u2.zeta();
    CHECK(norm2(sum - xi) <= 1e-10 * ks);
    CHECK(std::abs(dot(pair.alpha, xi)) <= 1e-10 * ks);
    CHECK(std::abs(norm2(pair.alpha) - 1.0) <= 1e-12);
  }
}

TEST_CASE("design_triple: conditioning bound at |xi| = kappa_s") {
  const auto dirs = fibonacci_sphere(256, 1.0);
  for (std::size_t d = 0; d < 256; ++d) {
    const ProbeTriple t = design_triple(dirs.point(d) * kMat.kappa_s(), kMat);
    CHECK(t.cond <= 2.0 + 1e-9);
    CHECK(t.norm >= 0.5 - 1e-9);
    CHECK_FALSE(t.flagged);
  }
}

TEST_CASE("design_triple: diagonal formula for 100 random xi (all axes)") {
  const double ks = kMat.kappa_s();
  for (std::uint32_t it = 0; it < 100; ++it) {
    const Vec3 xi = random_inband_xi(it, 1.9);
    const ProbeTriple t = design_triple(xi, kMat);
    for (std::size_t k = 0; k < 3; ++k) {
      const double want = 1.0 - xi[k] * xi[k] / (4.0 * ks * ks);
      CHECK(std::abs(t.coeff(k, k) - want) <= 1e-10);
      CHECK(t.coeff(k, k) > 0.0);
    }
  }
}

TEST_CASE("recorded conditioning diagnostics match the coefficient matrix") {
  for (std::uint32_t it = 0; it < 50; ++it) {
    const ProbeTriple t = design_triple(random_inband_xi(it, 1.9), kMat, 1e300);
    CHECK(std::abs(t.cond - cond2_3x3(t.coeff)) <= 1e-10 * t.cond);
    CHECK(std::abs(t.norm - norm2_3x3(t.coeff)) <= 1e-10 * t.norm);
  }
}

TEST_CASE("design_triple at the origin is the identity matrix") {
  const ProbeTriple t = design_triple(Vec3{}, kMat);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(t.coeff(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-14));
  CHECK(t.cond == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("median condition number grows towards the band edge") {
  const auto dirs = fibonacci_sphere(256, 1.0);
  std::vector<double> medians;
  for (double frac : {0.5, 1.0, 1.5, 1.9}) {
    std::vector<double> conds;
    conds.reserve(256);
    for (std::size_t d = 0; d < 256; ++d)
      conds.push_back(design_triple(dirs.point(d) * (frac * kMat.kappa_s()), kMat,
                                    1e300)
                          .cond);
    std::sort(conds.begin(), conds.end());
    medians.push_back(0.5 * (conds[127] + conds[128]));
  }
  for (std::size_t q = 1; q < medians.size(); ++q) CHECK(medians[q] > medians[q - 1]);
}

TEST_CASE("flagging ill-conditioned points") {
  // Push |xi| very close to the band edge with a tiny ceiling.
  const Vec3 xi = Vec3{1.0, 0.3, -0.2} * (1.9999 * kMat.kappa_s() /
                                          norm2(Vec3{1.0, 0.3, -0.2}));
  const ProbeTriple t = design_triple(xi, kMat, 2.0);
  CHECK(t.flagged);
}

TEST_CASE("diagonal optimality against random admissible parameters") {
  std::uint32_t trials = 0;
  for (std::uint32_t it = 0; it < 1000; ++it) {
    const Vec3 xi = random_inband_xi(it, 1.95);
    if (norm2(xi) < 1e-6) continue;
    const ProbeTriple t = design_triple(xi, kMat, 1e300);
    const double best = t.coeff(0, 0);
    const Mat3 random_a = probes_detail::random_coeff_matrix(xi, kMat, 555, it, 0);
    CHECK(std::abs(random_a(0, 0)) <= best + 1e-9);
    ++trials;
  }
  CHECK(trials > 900);
}

TEST_CASE("cyclic permutation equivariance of the construction") {
  // Q maps axis 1 to axis 2 (x,y,z) -> (z,x,y). The k=2 pair at Q xi must be
  // Q applied to the k=1 pair at xi.
  auto rot = [](const Vec3& v) { return Vec3{v.z, v.x, v.y}; };
  for (std::uint32_t it = 0; it < 50; ++it) {
    const Vec3 xi = random_inband_xi(it, 1.8);
    const ProbePair p1 = design_pair(xi, 0, kMat);
    const ProbePair p2 = design_pair(rot(xi), 1, kMat);
    const Vec3 want_zeta = rot(p1.u1.zeta());
    const Vec3 want_eta = rot(p1.u1.eta());
    CHECK(norm2(p2.u1.zeta() - want_zeta) <= 1e-12 * kMat.kappa_s());
    CHECK(norm2(p2.u1.eta() - want_eta) <= 1e-12);
  }
}

TEST_CASE("coefficient matrix diagonal entries permute under the rotation") {
  auto rot = [](const Vec3& v) { return Vec3{v.z, v.x, v.y}; };
  for (std::uint32_t it = 0; it < 20; ++it) {
    const Vec3 xi = random_inband_xi(it, 1.5);
    const ProbeTriple a = design_triple(xi, kMat);
    const ProbeTriple b = design_triple(rot(xi), kMat);
    CHECK(b.coeff(1, 1) == doctest::Approx(a.coeff(0, 0)).epsilon(1e-12));
    CHECK(b.coeff(2, 2) == doctest::Approx(a.coeff(1, 1)).epsilon(1e-12));
    CHECK(b.coeff(0, 0) == doctest::Approx(a.coeff(2, 2)).epsilon(1e-12));
  }
}

TEST_CASE("conditioning_survey") {
  SUBCASE("optimized beats random at every radius, medians bounded at beta=1") {
    const auto rows =
        conditioning_survey({4.0, 8.0, 12.0}, 64, kMat, /*seed=*/42);
    REQUIRE(rows.size() == 6);
    for (std::size_t q = 0; q < rows.size(); q += 2) {
      CHECK(rows[q].construction == "optimized");
      CHECK(rows[q + 1].construction == "random");
      CHECK(rows[q].median <= rows[q + 1].median);
    }
    CHECK(rows[2].radius == doctest::Approx(kMat.kappa_s()));
    CHECK(rows[2].median <= 2.0);
  }

  SUBCASE("single direction: mean = max = median") {
    const auto rows = conditioning_survey({6.0}, 1, kMat, 1);
    for (const auto& r : rows) {
      CHECK(r.mean == doctest::Approx(r.max));
      CHECK(r.mean == doctest::Approx(r.median));
    }
  }

  SUBCASE("radius outside the band") {
    CHECK_THROWS_AS((void)conditioning_survey({17.0}, 8, kMat, 1), OutOfBandError);
    CHECK_THROWS_AS((void)conditioning_survey({-1.0}, 8, kMat, 1), OutOfBandError);
  }
}
