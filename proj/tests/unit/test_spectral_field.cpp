#include <gtest/gtest.h>

#include <cmath>
#include <thread>
#include <numbers>
#include <random>

#include "biaxframe/error.hpp"
#include "biaxframe/initial_data.hpp"
#include "biaxframe/spectral_field.hpp"
#include "oracles.hpp"

using namespace biaxframe;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField noise(const Grid2D& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ScalarField f(g);
  for (std::size_t q = 0; q < f.size(); ++q) f[q] = nd(rng);
  return f;
}

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Grid, RejectsBadSizes) {
  for (std::size_t n : {0u, 8u, 24u, 100u}) {
    try {
      Grid2D g(n, 1.0);
      ADD_FAILURE() << "accepted n = " << n;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfiguration);
    }
  }
  EXPECT_THROW(Grid2D(32, 0.0), Error);
  EXPECT_THROW(Grid2D(32, -1.0), Error);
  EXPECT_NO_THROW(Grid2D(16, 1.0));
}

TEST(Grid, ModeNumbersAndSpacing) {
  const Grid2D g(32, 4.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.125);
  EXPECT_EQ(g.mode_x(0), 0);
  EXPECT_EQ(g.mode_x(5), 5);
  EXPECT_EQ(g.mode_x(31), -1);
  EXPECT_EQ(g.spectral_points(), 32u * 17u);
  EXPECT_DOUBLE_EQ(g.k_max(), 16.0 * kTwoPi / 4.0);
}

TEST(Spectral, ForwardInverseRoundTrip) {
  const Grid2D g(32, 3.0);
  const Spectral sp(g);
  const ScalarField f = noise(g, 1);
  EXPECT_LT(max_diff(sp.inverse(sp.forward(f)), f), 1e-13);
}

TEST(Spectral, ForwardMatchesSlowTransform) {
  const Grid2D g(16, 1.0);
  const Spectral sp(g);
  const ScalarField f = noise(g, 2);
  const Spectrum s = sp.forward(f);
  const std::size_t nh = g.n() / 2 + 1;
  for (std::size_t a : {0u, 3u, 8u, 13u}) {
    for (std::size_t b : {0u, 2u, 8u}) {
      EXPECT_LT(std::abs(s[a * nh + b] - oracle::dft(f, g.mode_x(a), g.mode_y(b))), 1e-11);
    }
  }
}

TEST(Spectral, DerivativesOfSingleModes) {
  const double L = 3.0;
  const Grid2D g(32, L);
  const Spectral sp(g);
  const double k = kTwoPi / L;
  // f = cos(3kx) sin(2ky): build from product-to-sum modes.
  const ScalarField f = oracle::from_modes(g, {{3, 2, 0.0, 0.5}, {-3, 2, 0.0, 0.5}});
  ScalarField fx(g), fy(g), lap(g);
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j < 32; ++j) {
      const double x = i * g.spacing(), y = j * g.spacing();
      fx(i, j) = -3 * k * std::sin(3 * k * x) * std::sin(2 * k * y);
      fy(i, j) = 2 * k * std::cos(3 * k * x) * std::cos(2 * k * y);
      lap(i, j) = -13 * k * k * std::cos(3 * k * x) * std::sin(2 * k * y);
    }
  }
  EXPECT_LT(max_diff(sp.dx(f), fx), 1e-12);
  EXPECT_LT(max_diff(sp.dy(f), fy), 1e-12);
  EXPECT_LT(max_diff(sp.laplacian(f), lap), 1e-11);
  const Vec2Field gr = sp.grad(f);
  EXPECT_LT(max_diff(sp.div(gr), lap), 1e-11);
}

TEST(Spectral, NyquistDerivativeIsZeroAndLaplacianComposes) {
  const Grid2D g(16, kTwoPi);
  const Spectral sp(g);
  const ScalarField f = oracle::from_modes(g, {{8, 0, 1.0, 0.0}});
  EXPECT_LT(sp.dx(f).max_abs(), 1e-13);
  const ScalarField r = noise(g, 3);
  EXPECT_LT(max_diff(sp.laplacian(r), sp.dx(sp.dx(r)) + sp.dy(sp.dy(r))), 1e-10);
}

TEST(Spectral, GradientIsSkewAdjoint) {
  const Grid2D g(32, 2.0);
  const Spectral sp(g);
  const ScalarField a = noise(g, 4), b = noise(g, 5);
  ScalarField p1 = sp.dx(a), p2 = sp.dx(b);
  for (std::size_t q = 0; q < a.size(); ++q) {
    p1[q] *= b[q];
    p2[q] *= a[q];
  }
  EXPECT_NEAR(sp.integrate(p1), -sp.integrate(p2), 1e-11);
}

TEST(Spectral, CurlOfPlanarField) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  Vec3Field v = {noise(g, 6), noise(g, 7), noise(g, 8)};
  const Vec3Field c = sp.curl3(v);
  EXPECT_LT(max_diff(c[0], sp.dy(v[2])), 1e-12);
  EXPECT_LT(max_diff(c[1], -1.0 * sp.dx(v[2])), 1e-12);
  EXPECT_LT(max_diff(c[2], sp.dx(v[1]) - sp.dy(v[0])), 1e-12);
  // div curl = 0 in-plane.
  EXPECT_LT(sp.div({c[0], c[1]}).max_abs(), 1e-10);
}

TEST(Spectral, LerayRemovesGradients) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const ScalarField phi = sp.dealias(noise(g, 9));
  const Vec2Field p = sp.leray_project(sp.grad(phi));
  EXPECT_LT(p[0].max_abs() + p[1].max_abs(), 1e-12);
}

TEST(Spectral, LerayKeepsDivergenceFreeFields) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const VelocityField v = random_divfree_velocity(sp, 1.0, 6, 10);
  const Vec2Field p = sp.leray_project(v);
  EXPECT_LT(max_diff(p[0], v[0]) + max_diff(p[1], v[1]), 1e-13);
}

TEST(Spectral, LerayMatchesPerModeHelmholtz) {
  const Grid2D g(16, kTwoPi);
  const Spectral sp(g);
  const Vec2Field v = {noise(g, 11), noise(g, 12)};
  const Vec2Field p = sp.leray_project(v);
  // Oracle: per mode, u - k (k.u)/|k|^2 with the derivative wavenumbers.
  for (long mx : {1L, -3L, 5L, 0L}) {
    for (long my : {0L, 2L, 7L}) {
      if (mx == 0 && my == 0) continue;
      const std::complex<double> ux = oracle::dft(v[0], mx, my), uy = oracle::dft(v[1], mx, my);
      const double kx = mx, ky = my;
      const std::complex<double> proj = (kx * ux + ky * uy) / (kx * kx + ky * ky);
      EXPECT_LT(std::abs(oracle::dft(p[0], mx, my) - (ux - kx * proj)), 1e-10);
      EXPECT_LT(std::abs(oracle::dft(p[1], mx, my) - (uy - ky * proj)), 1e-10);
    }
  }
  EXPECT_LT(sp.div(p).max_abs(), 1e-12);
}

TEST(Spectral, DealiasKeepsBandLimitedAndKillsHighModes) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const ScalarField low = oracle::from_modes(g, {{3, 4, 1.0, 0.5}, {-7, 6, 0.2, 0.0}});
  EXPECT_LT(max_diff(sp.dealias(low), low), 1e-14);
  const ScalarField high = oracle::from_modes(g, {{12, 0, 1.0, 0.0}});
  EXPECT_LT(sp.dealias(high).max_abs(), 1e-13);
}

TEST(Spectral, DealiasedProductMatchesDirectConvolution) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  // Two near-cutoff modes; their product has content at 7+8 and 8-7.
  const ScalarField a = oracle::from_modes(g, {{7, 3, 1.0, 0.0}});
  const ScalarField b = oracle::from_modes(g, {{8, -2, 0.0, 1.0}});
  ScalarField prod = a;
  for (std::size_t q = 0; q < prod.size(); ++q) prod[q] *= b[q];
  const ScalarField d = sp.dealias(prod);
  // cos(p) sin(q) = (sin(p+q) - sin(p-q)) / 2; exact sum modes are (15, 1) and (-1, 5).
  // (15, 1) lies beyond n/3, (-1, 5) is retained.
  std::vector<oracle::Mode> kept;
  for (const auto& m : std::vector<oracle::Mode>{{15, 1, 0.0, 0.5}, {-1, 5, 0.0, -0.5}}) {
    if (std::hypot(m.mx, m.my) <= 32.0 / 3.0) kept.push_back(m);
  }
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_LT(max_diff(d, oracle::from_modes(g, kept)), 1e-14);
}

TEST(Spectral, ParsevalAndIntegration) {
  const Grid2D g(32, 1.7);
  const Spectral sp(g);
  const ScalarField f = noise(g, 13);
  EXPECT_NEAR(sp.l2_squared(f), sp.l2_squared_spectral(sp.forward(f)), 1e-12 * sp.l2_squared(f));
  EXPECT_NEAR(sp.integrate(ScalarField(g, 2.0)), 2.0 * 1.7 * 1.7, 1e-13);
}

TEST(Spectral, ShapeMismatchIsDimensionError) {
  const Grid2D g(32, 1.0), h(16, 1.0);
  const Spectral sp(g);
  try {
    sp.forward(ScalarField(h));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
  EXPECT_THROW(require_shape(ScalarField(h), g, "test"), Error);
}

TEST(ScalarFieldOps, ArithmeticAndFiniteness) {
  const Grid2D g(16, 1.0);
  ScalarField a(g, 1.0), b(g, 2.0);
  a.axpy(3.0, b);
  EXPECT_EQ(a[7], 7.0);
  EXPECT_EQ((a - b)[0], 5.0);
  EXPECT_EQ((2.0 * b)[3], 4.0);
  EXPECT_TRUE(a.all_finite());
  a[5] = std::nan("");
  EXPECT_FALSE(a.all_finite());
  EXPECT_EQ(ScalarField(g, -3.0).max_abs(), 3.0);
}

TEST(ParallelFor, CoversRangeExactlyOnce) {
  std::vector<int> hits(1001, 0);
  parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ++hits[i];
  });
  for (int h : hits) EXPECT_EQ(h, 1);
  parallel_for(0, [](std::size_t b, std::size_t e) { EXPECT_EQ(b, e); });
}

TEST(ParallelFor, ThreadCountWithinHardware) {
  EXPECT_GE(kernel_threads(), 1u);
  EXPECT_LE(kernel_threads(), std::max(1u, std::thread::hardware_concurrency()));
}
