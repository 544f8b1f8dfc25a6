#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "biaxframe/error.hpp"
#include "biaxframe/initial_data.hpp"
#include "biaxframe/simulation.hpp"
#include "oracles.hpp"

using namespace biaxframe;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorKind::kIo;
}

Model coupled() {
  Model m;
  m.elastic = split_constants(oracle::random_K(3, 0.005, 0.015));
  m.hydro.eta = 0.02;
  m.hydro.beta = {0.004, 0.02, 0.015, 0.02, 0.025, 0.03};
  m.hydro.chi = {1.0, 0.8, 1.2};
  m.hydro.eta_rot = {0.1, 0.08, 0.12};
  return m;
}

SimState smooth_state(const Spectral& sp, std::uint64_t seed) {
  SimState s;
  s.frame = random_rotation_frame(sp.grid(), Frame::identity(), 0.6, 3, seed);
  s.velocity = random_divfree_velocity(sp, 1.0, 3, seed + 1);
  return s;
}

double state_distance(const SimState& a, const SimState& b) {
  double d = 0.0;
  for (int n = 0; n < 3; ++n) {
    for (int c = 0; c < 3; ++c) d = std::max(d, (a.frame.n[n][c] - b.frame.n[n][c]).max_abs());
  }
  for (int i = 0; i < 2; ++i) d = std::max(d, (a.velocity[i] - b.velocity[i]).max_abs());
  return d;
}

}  // namespace

TEST(Projection, RotationIsFixedPoint) {
  for (int s = 0; s < 10; ++s) {
    const Mat3 r = rotation_matrix(Vec3(0.3 * s, -0.1 * s, 1.0));
    EXPECT_LT((nearest_rotation(r) - r).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Projection, PerturbedFrameMatchesSvdPolarFactor) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const Mat3 r = rotation_matrix(Vec3(u(rng), u(rng), u(rng)) * 2.0);
    Mat3 e;
    for (int i = 0; i < 9; ++i) e(i / 3, i % 3) = u(rng);
    const Mat3 x = r + 1e-6 * e;
    const Mat3 p = nearest_rotation(x);
    EXPECT_LT((p * p.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((p - x).cwiseAbs().maxCoeff(), 2e-6);
    EXPECT_LT((p - oracle::svd_polar(x)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Projection, ReflectionAndFarInputsAreDegenerate) {
  Mat3 refl = Mat3::Identity();
  refl(2, 2) = -1.0;
  EXPECT_EQ(kind_of([&] { nearest_rotation(refl); }), ErrorKind::kDegeneracy);
  EXPECT_EQ(kind_of([] { nearest_rotation(Mat3::Zero()); }), ErrorKind::kDegeneracy);
  EXPECT_EQ(kind_of([] { nearest_rotation(1.5 * Mat3::Identity()); }), ErrorKind::kDegeneracy);
  const Grid2D g(16, 1.0);
  FrameField f = FrameField::uniform(g, Frame::identity());
  f.n[2][2][7] = -1.0;
  EXPECT_EQ(kind_of([&] { reorthonormalize(f); }), ErrorKind::kDegeneracy);
}

TEST(Cfl, DiffusionLimitedFormula) {
  const Grid2D g(64, kTwoPi);
  Model m;
  m.hydro.eta = 1.0;
  m.elastic = split_constants(std::array<double, 12>{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  const double h = kTwoPi / 64.0;
  EXPECT_NEAR(cfl_dt(g, make_vec2(g), m), 0.4 * h * h, 1e-16);
  const Grid2D g2(128, kTwoPi);
  EXPECT_NEAR(cfl_dt(g2, make_vec2(g2), m) * 4.0, cfl_dt(g, make_vec2(g), m), 1e-16);
}

TEST(Cfl, AdvectiveBranchForFastFlow) {
  const Grid2D g(64, kTwoPi);
  Model m;
  m.hydro.eta = 1e-6;
  m.elastic = split_constants(std::array<double, 12>{1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6,
                                                     1e-6, 1e-6, 1e-6, 1e-6, 1e-6});
  const VelocityField v = {ScalarField(g, 300.0), ScalarField(g, 400.0)};
  EXPECT_NEAR(cfl_dt(g, v, m), 0.4 * g.spacing() / 500.0, 1e-15);
}

TEST(Step, EquilibriumIsUnchanged) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  SimState s;
  s.frame = FrameField::uniform(g, rotated(Frame::identity(), Vec3(0.4, 0.2, -0.3)));
  s.velocity = make_vec2(g);
  const Model m = coupled();
  const SimState n = step(sp, s, 1e-3, m);
  EXPECT_LT(state_distance(s, n), 1e-14);
  EXPECT_EQ(n.step, 1u);
  EXPECT_DOUBLE_EQ(n.t, 1e-3);
}

TEST(Step, TooLargeStepIsStabilityError) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const SimState s = smooth_state(sp, 1);
  const Model m = coupled();
  const double limit = cfl_dt(g, s.velocity, m);
  EXPECT_EQ(kind_of([&] { step(sp, s, 1.01 * limit, m); }), ErrorKind::kStability);
  EXPECT_NO_THROW(step(sp, s, limit, m));
  StepOptions off;
  off.check_cfl = false;
  EXPECT_NO_THROW(step(sp, s, 1.01 * limit, m, off));
  EXPECT_EQ(kind_of([&] { step(sp, s, -1.0, m); }), ErrorKind::kStability);
}

TEST(Step, NonFiniteStateIsDivergence) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  SimState s = smooth_state(sp, 2);
  s.velocity[0][10] = std::numeric_limits<double>::quiet_NaN();
  StepOptions off;
  off.check_cfl = false;
  const ErrorKind k = kind_of([&] { step(sp, s, 1e-3, coupled(), off); });
  EXPECT_TRUE(k == ErrorKind::kDivergence || k == ErrorKind::kDegeneracy);
}

TEST(Step, ProjectionKeepsFramesOrthonormal) {
  // Well resolved, so the pre-projection drift stays below the tolerance.
  const Grid2D g(64, kTwoPi);
  const Spectral sp(g);
  SimState s = smooth_state(sp, 2);
  const Model m = coupled();
  const double dt = 0.5 * cfl_dt(g, s.velocity, m);
  for (int i = 0; i < 10; ++i) {
    StepReport r;
    s = step(sp, s, dt, m, {}, &r);
    EXPECT_LE(r.drift_after, 1e-14);
    EXPECT_LT(r.drift_before, kFrameDriftTolerance);
  }
}

TEST(Step, FourthOrderSelfConvergence) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const SimState s0 = smooth_state(sp, 4);
  const Model m = coupled();
  const double T = 0.2;
  auto advance = [&](int n) {
    SimState s = s0;
    for (int i = 0; i < n; ++i) s = step(sp, s, T / n, m);
    return s;
  };
  const SimState a = advance(10), b = advance(20), c = advance(40);
  const double e1 = state_distance(a, b), e2 = state_distance(b, c);
  EXPECT_GE(std::log2(e1 / e2), 3.7) << e1 << " " << e2;
}

TEST(Step, DeterministicBitwise) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const SimState s0 = smooth_state(sp, 5);
  const Model m = coupled();
  const double dt = 0.5 * cfl_dt(g, s0.velocity, m);
  EXPECT_TRUE(step(sp, s0, dt, m) == step(sp, s0, dt, m));
}

TEST(EnergySeries, ExactForQuadratics) {
  std::vector<EnergyRow> rows(6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double t = 0.1 * static_cast<double>(i);
    rows[i].t = t;
    rows[i].ledger.kinetic = 3.0 - 2.0 * t + 0.5 * t * t;
    rows[i].ledger.d_visc = 2.0 - t;  // -dE/dt exactly
  }
  finish_energy_series(rows);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.ledger.dEdt, -2.0 + r.t, 1e-13);
    EXPECT_NEAR(r.ledger.residual, 0.0, 1e-13);
    EXPECT_LT(relative_residual(r.ledger), 1e-12);
  }
}

TEST(EnergySeries, RelativeResidualFloor) {
  EnergyLedger e;
  e.residual = 1e-20;
  EXPECT_NEAR(relative_residual(e), 1e-8, 1e-20);
}

TEST(Run, EquilibriumLedgerStaysZero) {
  const Grid2D g(16, kTwoPi);
  const Spectral sp(g);
  SimState s;
  s.frame = FrameField::uniform(g, Frame::identity());
  s.velocity = make_vec2(g);
  StepperConfig rc;
  rc.dt = 0.01;
  rc.t_end = 0.05;
  const RunResult r = run(sp, s, coupled(), rc);
  EXPECT_EQ(r.energy.size(), 6u);
  for (const auto& row : r.energy) {
    EXPECT_EQ(row.ledger.total(), 0.0);
    EXPECT_EQ(row.ledger.d_total(), 0.0);
  }
  for (const auto& row : r.metrics) EXPECT_EQ(row.Phi, 0.0);
}

TEST(Run, TaylorGreenDecay) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  Model m;
  m.hydro.eta = 0.1;
  std::array<double, 12> K;
  K.fill(1e-10);
  m.elastic = split_constants(K);
  SimState s;
  s.frame = FrameField::uniform(g, Frame::identity());
  s.velocity = taylor_green(g, 1.0, 1);
  StepperConfig rc;
  rc.t_end = 2.0;
  rc.sample_every = 1000;
  const RunResult r = run(sp, s, m, rc);
  const double e0 = r.energy.front().ledger.kinetic;
  for (const auto& row : r.energy) {
    EXPECT_NEAR(row.ledger.kinetic / e0, std::exp(-4.0 * m.hydro.eta * row.t), 1e-8);
  }
}

TEST(Run, ObserverSeesEveryStepAndMetricsAtCadence) {
  const Grid2D g(16, kTwoPi);
  const Spectral sp(g);
  const SimState s0 = smooth_state(sp, 6);
  StepperConfig rc;
  rc.t_end = 0.05;
  rc.sample_every = 2;
  std::vector<std::uint64_t> seen;
  const RunResult r = run(sp, s0, coupled(), rc, [&](const SimState& s) { seen.push_back(s.step); });
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen.front(), 0u);
  EXPECT_EQ(seen.back(), r.final.step);
  EXPECT_EQ(seen.size(), r.final.step + 1);
  EXPECT_NEAR(r.final.t, rc.t_end, 1e-14);
  EXPECT_EQ(r.metrics.back().t, r.final.t);
}

TEST(Run, ResolveDtLandsOnEndTime) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const SimState s0 = smooth_state(sp, 7);
  StepperConfig rc;
  rc.t_end = 1.0;
  rc.dt = 0.3;
  EXPECT_DOUBLE_EQ(resolve_dt(g, s0, coupled(), rc), 0.25);
  rc.dt = 0.0;
  const double auto_dt = resolve_dt(g, s0, coupled(), rc);
  EXPECT_LE(auto_dt, 0.5 * cfl_dt(g, s0.velocity, coupled()) * (1.0 + 1e-12));
  EXPECT_NEAR(std::fmod(1.0 / auto_dt + 0.5, 1.0), 0.5, 1e-9);
  rc.t_end = 0.0;
  EXPECT_EQ(kind_of([&] { resolve_dt(g, s0, coupled(), rc); }), ErrorKind::kConfiguration);
}

TEST(Twin, ZeroPerturbationIsBitwiseZero) {
  const Grid2D g(16, kTwoPi);
  const Spectral sp(g);
  const SimState s0 = smooth_state(sp, 8);
  StepperConfig rc;
  rc.t_end = 0.1;
  const TwinResult r = twin_run(sp, s0, s0, coupled(), rc);
  EXPECT_TRUE(r.a == r.b);
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.Phi, 0.0);
    EXPECT_GE(m.F, 1.0);
  }
  EXPECT_EQ(kind_of([&] { gronwall_constant(r.metrics); }), ErrorKind::kUndefinedRatio);
}

TEST(Twin, LinearRegimeScaling) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const SimState a0 = smooth_state(sp, 9);
  StepperConfig rc;
  rc.t_end = 0.2;
  std::vector<TwinResult> out;
  for (double eps : {1e-6, 1e-7}) {
    SimState b0 = a0;
    perturb(sp, b0.frame, b0.velocity, eps, 3, 10);
    out.push_back(twin_run(sp, a0, b0, coupled(), rc));
  }
  EXPECT_NEAR(out[0].metrics.front().Phi / out[1].metrics.front().Phi, 100.0, 1.0);
  for (const auto& m : out[0].metrics) EXPECT_TRUE(std::isfinite(m.F) && m.F >= 1.0);
}

TEST(Gronwall, SyntheticExponential) {
  // Phi = exp(2 t), F = 1: C = 2.
  std::vector<MetricRow> rows;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    rows.push_back({t, std::exp(2.0 * t), 0.0, 0.0, 1.0});
  }
  EXPECT_NEAR(gronwall_constant(rows), 2.0, 1e-12);
}

TEST(Perturb, ZeroAmplitudeIsNoOp) {
  const Grid2D g(16, kTwoPi);
  const Spectral sp(g);
  const SimState s0 = smooth_state(sp, 11);
  SimState s = s0;
  perturb(sp, s.frame, s.velocity, 0.0, 3, 12);
  EXPECT_TRUE(s == s0);
}
