#pragma once

// Time integration of the coupled frame/flow system: classical RK4 on the
// frame and velocity, followed by a per-point polar projection of the frame
// back onto SO(3). Runs use a fixed step; twin runs advance two states with
// the identical step sequence.

#include <cstdint>
#include <functional>
#include <vector>

#include "biaxframe/elasticity.hpp"
#include "biaxframe/hydrodynamics.hpp"
#include "biaxframe/littlewood_paley.hpp"
#include "biaxframe/spectral_field.hpp"

namespace biaxframe {

struct SimState {
  FrameField frame;
  VelocityField velocity;
  double t = 0.0;
  std::uint64_t step = 0;

  bool operator==(const SimState&) const = default;
};

struct Model {
  ElasticParams elastic;
  HydroParams hydro;
};

struct StateRate {
  std::array<Vec3Field, 3> frame;
  VelocityField velocity;
};

/// Time derivative of (frame, velocity) at a state.
StateRate coupled_rhs(const Spectral& sp, const FrameField& f, const VelocityField& v,
                      const Model& m);

/// dt = safety * min(h / max|v|, h^2 / max(eta, gamma_max / chi_min)).
double cfl_dt(const Grid2D& g, const VelocityField& v, const Model& m, double safety = 0.4);

/// Nearest rotation at every point. Throws Error(kDegeneracy) where the
/// input has det <= 0 or lies farther than 0.1 (Frobenius) from SO(3).
FrameField reorthonormalize(const FrameField& f);
/// Polar factor of a single 3x3 matrix under the same rules.
Mat3 nearest_rotation(const Mat3& x);

struct StepReport {
  double drift_before = 0.0;  // max orthonormality defect before projection
  double drift_after = 0.0;
};

struct StepOptions {
  double safety = 0.4;
  bool check_cfl = true;
};

/// One RK4 step. Throws Error(kStability) if dt exceeds cfl_dt and
/// Error(kDivergence) if the new state is not finite.
SimState step(const Spectral& sp, const SimState& s, double dt, const Model& m,
              const StepOptions& opt = {}, StepReport* report = nullptr);

struct EnergyRow {
  double t = 0.0;
  EnergyLedger ledger;
};

/// Fills dEdt and residual of a uniformly spaced energy series: centered
/// differences inside, second-order one-sided at both ends.
void finish_energy_series(std::vector<EnergyRow>& rows);

/// |dEdt + D| / max(|dEdt|, |D|, floor)
double relative_residual(const EnergyLedger& e, double floor = 1e-12);

struct MetricRow {
  double t = 0.0;
  double Phi = 0.0;
  double U = 0.0;
  double V = 0.0;
  double F = 0.0;
};

struct StepperConfig {
  double dt = 0.0;             // fixed step; 0 selects cfl_fraction * cfl_dt(initial)
  double cfl_fraction = 0.5;
  double safety = 0.4;
  double t_end = 1.0;
  int sample_every = 1;        // metric and snapshot cadence in steps
  WeakMetricConfig besov;
};

/// Fixed step chosen by a run for a given initial state.
double resolve_dt(const Grid2D& g, const SimState& s0, const Model& m, const StepperConfig& rc);

struct RunResult {
  SimState final;
  double dt = 0.0;
  std::vector<EnergyRow> energy;   // every step, including t = 0
  std::vector<MetricRow> metrics;  // every sample
};

using StepObserver = std::function<void(const SimState&)>;

/// Single trajectory; metrics pair the state with itself (Phi = 0).
/// `on_step` sees the initial state and every accepted step.
RunResult run(const Spectral& sp, const SimState& s0, const Model& m, const StepperConfig& rc,
              const StepObserver& on_step = {});

struct TwinResult {
  SimState a, b;
  double dt = 0.0;
  std::vector<EnergyRow> energy;   // of state a
  std::vector<MetricRow> metrics;
};

/// Advances a and b in lockstep with the dt chosen for a.
TwinResult twin_run(const Spectral& sp, const SimState& a0, const SimState& b0, const Model& m,
                    const StepperConfig& rc,
                    const std::function<void(const SimState&, const SimState&)>& on_step = {});

/// sup over t > 0 of (log Phi(t) - log Phi(0)) / int_0^t F, trapezoidal in t.
double gronwall_constant(const std::vector<MetricRow>& rows);

}  // namespace biaxframe
