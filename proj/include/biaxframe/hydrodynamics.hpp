#pragma once

// Coupled frame/flow dynamics: coefficient admissibility, velocity-gradient
// kinematics, frame rotation rates, viscous stress, the projected momentum
// right-hand side and the energy-dissipation channels.
//
// The velocity is in-plane, v: grid -> R^2. Its gradient kappa_ij = d_j v_i
// is embedded in 3x3 with a zero third row and column.

#include <array>
#include <string>
#include <vector>

#include "biaxframe/elasticity.hpp"
#include "biaxframe/frame_algebra.hpp"
#include "biaxframe/spectral_field.hpp"

namespace biaxframe {

using VelocityField = Vec2Field;

struct HydroParams {
  double eta = 1.0;                    // Newtonian viscosity
  std::array<double, 6> beta{};        // beta_0 .. beta_5
  std::array<double, 3> chi{1.0, 1.0, 1.0};  // rotational drag chi_1 .. chi_3
  std::array<double, 3> eta_rot{};     // flow-alignment eta_1 .. eta_3
};

struct Violation {
  std::string key;         // config key path, e.g. "hydro.beta0"
  std::string inequality;  // the failed relation, e.g. "beta0^2 <= beta1*beta2"
  std::string detail;      // the offending numbers
};

/// Every violated admissibility condition; empty means valid.
std::vector<Violation> validate(const HydroParams& p);
/// Throws Error(kParameter) listing all violations.
void require_valid(const HydroParams& p);
std::string format_violations(const std::vector<Violation>& v);

struct Kinematics {
  Tensor33Field kappa;  // d_j v_i
  Tensor33Field A;      // symmetric part
  Tensor33Field Omega;  // antisymmetric part

  Mat3 A_at(std::size_t p) const;
  Mat3 Omega_at(std::size_t p) const;
};

Kinematics kinematics(const Spectral& sp, const VelocityField& v);

/// Rotation rates N_k about n_k, k = 1..3.
using Rates = std::array<ScalarField, 3>;

/// N_k = -(1/2) Omega.a_k + (eta_k/chi_k) A.s_(6-k) - ml_k/chi_k, with
/// s_5, s_4, s_3 the symmetric partners of the rotation about n1, n2, n3.
Vec3 corotational_rates_at(const Frame& f, const Mat3& A, const Mat3& Omega, const Vec3& ml,
                           const HydroParams& p);
Rates corotational_rates(const FrameField& f, const Kinematics& kin,
                         const std::array<ScalarField, 3>& ml, const HydroParams& p);

/// d_t n_a = omega x n_a - v.grad n_a with omega = sum_k N_k n_k.
std::array<Vec3Field, 3> frame_rhs(const FrameField& f, const FrameGradient& grads,
                                   const Rates& rates, const VelocityField& v);
std::array<Vec3Field, 3> frame_rhs(const Spectral& sp, const FrameField& f, const Rates& rates,
                                   const VelocityField& v);

Mat3 viscous_stress_at(const Frame& f, const Mat3& A, const Mat3& Omega, const Vec3& rates,
                       const HydroParams& p);
Tensor33Field viscous_stress(const FrameField& f, const Kinematics& kin, const Rates& rates,
                             const HydroParams& p);

/// -P[v.grad v] + eta Lap v + P[div(sigma + sigma_d)], restricted to the
/// dealiased band. Only the in-plane block of the stresses is used.
VelocityField momentum_rhs(const Spectral& sp, const VelocityField& v, const Tensor33Field& sigma,
                           const Tensor33Field& sigma_d, double eta);

struct EnergyLedger {
  double kinetic = 0.0;
  double elastic = 0.0;
  double d_visc = 0.0;
  std::array<double, 3> d_rot{};
  double d_beta12 = 0.0;
  double d_s3 = 0.0;
  double d_s4 = 0.0;
  double d_s5 = 0.0;
  double dEdt = 0.0;      // filled in by a time-series monitor
  double residual = 0.0;  // dEdt + d_total()

  double total() const { return kinetic + elastic; }
  double d_total() const;
};

/// Energies and dissipation channels of one state; dEdt and residual stay 0.
EnergyLedger energy_report(const Spectral& sp, const FrameField& f, const VelocityField& v,
                           const HydroParams& hp, const ElasticParams& ep);

}  // namespace biaxframe
