#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "biaxframe/error.hpp"
#include "biaxframe/hydrodynamics.hpp"
#include "biaxframe/initial_data.hpp"
#include "oracles.hpp"

using namespace biaxframe;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

HydroParams admissible() {
  HydroParams p;
  p.eta = 1.0;
  p.beta = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  p.chi = {1.0, 1.0, 1.0};
  p.eta_rot = {0.5, 0.5, 0.5};
  return p;
}

HydroParams generic() {
  HydroParams p;
  p.eta = 0.3;
  p.beta = {0.2, 0.5, 0.4, 0.3, 0.6, 0.7};
  p.chi = {1.0, 0.7, 1.4};
  p.eta_rot = {0.4, -0.3, 0.5};
  return p;
}

Mat3 skew_z(double w) {
  Mat3 m = Mat3::Zero();
  m(0, 1) = -w;
  m(1, 0) = w;
  return m;
}

bool has_key(const std::vector<Violation>& v, const std::string& key) {
  for (const auto& x : v) {
    if (x.key == key) return true;
  }
  return false;
}

struct Scene {
  Grid2D g{32, kTwoPi};
  Spectral sp{g};
  FrameField f = random_rotation_frame(g, rotated(Frame::identity(), Vec3(0.1, 0.5, 0.2)), 0.9,
                                       4, 3);
  VelocityField v = random_divfree_velocity(sp, 1.0, 4, 4);
  ElasticParams ep = split_constants(oracle::random_K(5, 0.2, 0.6));
};

}  // namespace

TEST(Validate, AdmissibleCoefficients) { EXPECT_TRUE(validate(admissible()).empty()); }

TEST(Validate, CrossViscosityTooLarge) {
  HydroParams p = admissible();
  p.beta[0] = 2.0;
  const auto v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].key, "hydro.beta0");
  EXPECT_EQ(v[0].inequality, "beta0^2 <= beta1*beta2");
}

TEST(Validate, AlignmentTooLarge) {
  HydroParams p = admissible();
  p.eta_rot[0] = 2.0;
  const auto v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].inequality, "eta1^2 <= beta5*chi1");
}

TEST(Validate, ReportsEveryViolation) {
  HydroParams p = admissible();
  p.beta[0] = 2.0;
  p.eta_rot = {2.0, 2.0, 2.0};
  p.chi[1] = 0.0;
  p.eta = -1.0;
  const auto v = validate(p);
  EXPECT_GE(v.size(), 5u);
  EXPECT_TRUE(has_key(v, "hydro.beta0"));
  EXPECT_TRUE(has_key(v, "hydro.eta"));
  EXPECT_TRUE(has_key(v, "hydro.chi[1]"));
  try {
    require_valid(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParameter);
    EXPECT_NE(std::string(e.what()).find("beta0^2 <= beta1*beta2"), std::string::npos);
  }
  EXPECT_NO_THROW(require_valid(admissible()));
}

TEST(Kinematics, ZeroVelocity) {
  const Grid2D g(16, 1.0);
  const Spectral sp(g);
  const Kinematics k = kinematics(sp, make_vec2(g));
  for (std::size_t p = 0; p < g.points(); p += 17) {
    EXPECT_EQ(k.A_at(p), Mat3::Zero());
    EXPECT_EQ(k.Omega_at(p), Mat3::Zero());
  }
}

TEST(Kinematics, TaylorGreenIsTracelessAndSplitsExactly) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const Kinematics k = kinematics(sp, taylor_green(g, 1.3, 2));
  for (std::size_t p = 0; p < g.points(); ++p) {
    const Mat3 A = k.A_at(p), W = k.Omega_at(p);
    EXPECT_LT(std::abs(A.trace()), 1e-13);
    Mat3 kap;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) kap(i, j) = k.kappa[i][j][p];
    }
    EXPECT_LT((A + W - kap).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((A - A.transpose()).norm(), 1e-15);
    EXPECT_EQ(kap.row(2).norm() + kap.col(2).norm(), 0.0);
  }
}

TEST(Rates, RestStateHasNoRotation) {
  const Vec3 n = corotational_rates_at(rotated(Frame::identity(), Vec3(1, 2, 3)), Mat3::Zero(),
                                       Mat3::Zero(), Vec3::Zero(), generic());
  EXPECT_EQ(n, Vec3::Zero());
}

TEST(Rates, RigidRotationRotatesWithTheFluid) {
  const HydroParams hp = generic();
  for (int s = 0; s < 5; ++s) {
    const Frame f = rotated(Frame::identity(), Vec3(0.3 * s, -0.7, 1.1 - 0.2 * s));
    const Mat3 W = skew_z(0.9);
    const Vec3 N = corotational_rates_at(f, Mat3::Zero(), W, Vec3::Zero(), hp);
    const Vec3 omega = N(0) * f.n1 + N(1) * f.n2 + N(2) * f.n3;
    for (int a = 0; a < 3; ++a) EXPECT_LT((omega.cross(f[a]) - W * f[a]).norm(), 1e-14);
  }
}

TEST(Rates, StrainAlignedFrameDoesNotRotate) {
  Mat3 A = Mat3::Zero();
  A.diagonal() << 0.7, -0.7, 0.0;
  Frame f;  // permuted eigenvectors of A
  f.n1 = Vec3::UnitY();
  f.n2 = Vec3::UnitZ();
  f.n3 = Vec3::UnitX();
  const Vec3 N = corotational_rates_at(f, A, Mat3::Zero(), Vec3::Zero(), generic());
  EXPECT_LT(N.norm(), 1e-15);
}

TEST(Rates, FieldVersionMatchesPointwise) {
  Scene s;
  const Kinematics kin = kinematics(s.sp, s.v);
  const VariationalForces vf = variational_forces(s.sp, s.f, s.ep);
  const Rates r = corotational_rates(s.f, kin, vf.ml, generic());
  for (std::size_t p = 0; p < s.g.points(); p += 19) {
    const Vec3 ml(vf.ml[0][p], vf.ml[1][p], vf.ml[2][p]);
    const Vec3 n = corotational_rates_at(s.f.at(p), kin.A_at(p), kin.Omega_at(p), ml, generic());
    for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(r[k][p], n(k));
  }
}

TEST(FrameRhs, ZeroFlowZeroRatesIsZero) {
  Scene s;
  const Rates zero = {ScalarField(s.g), ScalarField(s.g), ScalarField(s.g)};
  const auto rhs = frame_rhs(s.sp, s.f, zero, make_vec2(s.g));
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(rhs[a][c].max_abs(), 0.0);
  }
}

TEST(FrameRhs, RotationalPartIsSkew) {
  Scene s;
  const Kinematics kin = kinematics(s.sp, s.v);
  const VariationalForces vf = variational_forces(s.sp, s.f, s.ep);
  const Rates r = corotational_rates(s.f, kin, vf.ml, generic());
  const FrameGradient gr = frame_gradient(s.sp, s.f);
  const auto rhs = frame_rhs(s.f, gr, r, s.v);
  for (std::size_t p = 0; p < s.g.points(); p += 7) {
    Vec3 G[3];
    for (int a = 0; a < 3; ++a) {
      const Mat3 d = gr.at(a, p);
      G[a] = Vec3(rhs[a][0][p], rhs[a][1][p], rhs[a][2][p]) + s.v[0][p] * d.col(0) +
             s.v[1][p] * d.col(1);
    }
    const Frame fr = s.f.at(p);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(fr[a].dot(G[b]) + fr[b].dot(G[a]), 0.0, 1e-12);
    }
  }
}

TEST(FrameRhs, RigidRotationWithTranslation) {
  Scene s;
  Kinematics kin{make_tensor33(s.g), make_tensor33(s.g), make_tensor33(s.g)};
  for (std::size_t q = 0; q < s.g.points(); ++q) {
    kin.Omega[0][1][q] = kin.kappa[0][1][q] = -0.5;
    kin.Omega[1][0][q] = kin.kappa[1][0][q] = 0.5;
  }
  const std::array<ScalarField, 3> ml = {ScalarField(s.g), ScalarField(s.g), ScalarField(s.g)};
  const Rates r = corotational_rates(s.f, kin, ml, generic());
  const VelocityField v = {ScalarField(s.g, 0.3), ScalarField(s.g, 0.8)};
  const FrameGradient gr = frame_gradient(s.sp, s.f);
  const auto rhs = frame_rhs(s.f, gr, r, v);
  for (std::size_t p = 0; p < s.g.points(); ++p) {
    const Frame fr = s.f.at(p);
    for (int a = 0; a < 3; ++a) {
      const Mat3 d = gr.at(a, p);
      const Vec3 e = skew_z(0.5) * fr[a] - 0.3 * d.col(0) - 0.8 * d.col(1);
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(rhs[a][c][p], e(c), 1e-12);
    }
  }
}

TEST(FrameRhs, ShapeMismatch) {
  Scene s;
  const Grid2D h(16, kTwoPi);
  const Rates bad = {ScalarField(h), ScalarField(h), ScalarField(h)};
  try {
    frame_rhs(s.sp, s.f, bad, s.v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

TEST(ViscousStress, VanishesAtRest) {
  const Mat3 s = viscous_stress_at(rotated(Frame::identity(), Vec3(0.2, 0.3, 0.4)), Mat3::Zero(),
                                   Mat3::Zero(), Vec3::Zero(), generic());
  EXPECT_EQ(s, Mat3::Zero());
}

TEST(ViscousStress, PowerEqualsDissipationChannels) {
  Scene s;
  const HydroParams hp = generic();
  require_valid(hp);
  const Kinematics kin = kinematics(s.sp, s.v);
  const VariationalForces vf = variational_forces(s.sp, s.f, s.ep);
  const Rates r = corotational_rates(s.f, kin, vf.ml, hp);
  const Tensor33Field sigma = viscous_stress(s.f, kin, r, hp);
  ScalarField power(s.g);
  for (std::size_t p = 0; p < s.g.points(); ++p) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) power[p] += sigma[i][j][p] * kin.kappa[i][j][p];
    }
    // Rates oppose the molecular field: rotation work enters with a minus sign.
    for (int k = 0; k < 3; ++k) power[p] -= r[k][p] * vf.ml[k][p];
  }
  const EnergyLedger e = energy_report(s.sp, s.f, s.v, hp, s.ep);
  const double channels = e.d_total() - e.d_visc;
  EXPECT_NEAR(s.sp.integrate(power), channels, 1e-10 * std::abs(channels));
  EXPECT_GT(channels, 0.0);
}

TEST(Momentum, RestIsZero) {
  const Grid2D g(16, 1.0);
  const Spectral sp(g);
  const Tensor33Field z = make_tensor33(g);
  const VelocityField r = momentum_rhs(sp, make_vec2(g), z, z, 1.0);
  EXPECT_EQ(r[0].max_abs() + r[1].max_abs(), 0.0);
}

TEST(Momentum, TaylorGreenIsPureViscousDecay) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  const double eta = 0.05;
  const VelocityField v = taylor_green(g, 1.0, 1);
  const Tensor33Field z = make_tensor33(g);
  const VelocityField r = momentum_rhs(sp, v, z, z, eta);
  // Mode (1, 1): Lap v = -2 v.
  for (int i = 0; i < 2; ++i) EXPECT_LT((r[i] - (-2.0 * eta) * v[i]).max_abs(), 1e-14);
  // d/dt (1/2)|v|^2 = -2 eta |k|^2 (1/2)|v|^2 with |k|^2 = 2.
  double power = 0.0, ke = 0.0;
  for (int i = 0; i < 2; ++i) {
    ScalarField vr = v[i];
    for (std::size_t q = 0; q < vr.size(); ++q) vr[q] *= r[i][q];
    power += sp.integrate(vr);
    ke += 0.5 * sp.l2_squared(v[i]);
  }
  EXPECT_NEAR(power, -2.0 * eta * 2.0 * ke, 1e-12);
}

TEST(Momentum, OutputIsDivergenceFree) {
  Scene s;
  const HydroParams hp = generic();
  const Kinematics kin = kinematics(s.sp, s.v);
  const VariationalForces vf = variational_forces(s.sp, s.f, s.ep);
  const Rates r = corotational_rates(s.f, kin, vf.ml, hp);
  const VelocityField out = momentum_rhs(s.sp, s.v, viscous_stress(s.f, kin, r, hp),
                                         distortion_stress(s.sp, s.f, s.ep), hp.eta);
  EXPECT_LT(s.sp.div(out).max_abs(), 1e-12);
  EXPECT_LT((s.sp.dealias(out[0]) - out[0]).max_abs(), 1e-13);
}

TEST(Ledger, EquilibriumHasNoChannels) {
  const Grid2D g(16, 1.0);
  const Spectral sp(g);
  const EnergyLedger e = energy_report(sp, FrameField::uniform(g, Frame::identity()),
                                       make_vec2(g), generic(), split_constants(oracle::random_K(1)));
  EXPECT_EQ(e.kinetic, 0.0);
  EXPECT_EQ(e.elastic, 0.0);
  EXPECT_EQ(e.d_total(), 0.0);
}

TEST(Ledger, PureFluidOnlyViscous) {
  const Grid2D g(32, kTwoPi);
  const Spectral sp(g);
  HydroParams hp;
  hp.eta = 0.2;
  const VelocityField v = taylor_green(g, 1.0, 1);
  const EnergyLedger e = energy_report(sp, FrameField::uniform(g, Frame::identity()), v, hp,
                                       split_constants(oracle::random_K(2)));
  EXPECT_GT(e.d_visc, 0.0);
  EXPECT_EQ(e.d_rot[0] + e.d_rot[1] + e.d_rot[2], 0.0);
  EXPECT_NEAR(e.d_beta12 + e.d_s3 + e.d_s4 + e.d_s5, 0.0, 1e-30);
  EXPECT_DOUBLE_EQ(e.d_total(), e.d_visc);
  // eta |grad v|^2 = eta |k|^2 |v|^2 = 2 eta * 2 * KE
  EXPECT_NEAR(e.d_visc, 4.0 * hp.eta * e.kinetic, 1e-12);
}

TEST(Ledger, DissipationNonnegativeForAdmissibleCoefficients) {
  Scene s;
  HydroParams hp = generic();
  // Both inequalities hold with equality, exactly representable.
  hp.beta[0] = hp.beta[1] = hp.beta[2] = 0.5;
  hp.beta[5] = 0.25;
  hp.chi[0] = 1.0;
  hp.eta_rot[0] = 0.5;
  ASSERT_TRUE(validate(hp).empty()) << format_violations(validate(hp));
  const EnergyLedger e = energy_report(s.sp, s.f, s.v, hp, s.ep);
  EXPECT_GE(e.d_total(), -1e-12);
  EXPECT_GE(e.d_beta12, -1e-12);
  EXPECT_GE(e.d_s5, -1e-12);
}
