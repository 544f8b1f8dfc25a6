#include "biaxframe/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "biaxframe/error.hpp"

namespace biaxframe {

StateRate coupled_rhs(const Spectral& sp, const FrameField& f, const VelocityField& v,
                      const Model& m) {
  const FrameGradient grads = frame_gradient(sp, f);
  const VariationalForces vf = variational_forces(sp, f, grads, m.elastic);
  const Kinematics kin = kinematics(sp, v);
  const Rates rates = corotational_rates(f, kin, vf.ml, m.hydro);
  StateRate r;
  r.frame = frame_rhs(f, grads, rates, v);
  const Tensor33Field sigma = viscous_stress(f, kin, rates, m.hydro);
  const Tensor33Field sigma_d = distortion_stress(f, grads, m.elastic);
  r.velocity = momentum_rhs(sp, v, sigma, sigma_d, m.hydro.eta);
  return r;
}

double cfl_dt(const Grid2D& g, const VelocityField& v, const Model& m, double safety) {
  const double h = g.spacing();
  double vmax = 0.0;
  for (std::size_t p = 0; p < v[0].size(); ++p) {
    vmax = std::max(vmax, std::hypot(v[0][p], v[1][p]));
  }
  const double chi_min = std::min({m.hydro.chi[0], m.hydro.chi[1], m.hydro.chi[2]});
  const double diff = std::max(m.hydro.eta, m.elastic.gamma_max() / chi_min);
  const double adv = vmax > 0.0 ? h / vmax : std::numeric_limits<double>::infinity();
  return safety * std::min(adv, h * h / diff);
}

// ---------------------------------------------------------------- projection

Mat3 nearest_rotation(const Mat3& x) {
  if (!x.allFinite() || !(x.determinant() > 0.0)) {
    throw Error(ErrorKind::kDegeneracy, "frame matrix is singular or reflected");
  }
  // Newton iteration for the orthogonal polar factor.
  Mat3 r = x;
  for (int it = 0; it < 30; ++it) {
    const Mat3 next = 0.5 * (r + r.inverse().transpose());
    const double change = (next - r).cwiseAbs().maxCoeff();
    r = next;
    if (change < 1e-15) break;
  }
  // One more sweep settles the last bits, so the map is idempotent.
  r = 0.5 * (r + r.inverse().transpose());
  if ((x - r).norm() > 0.1) {
    throw Error(ErrorKind::kDegeneracy, "frame matrix is farther than 0.1 from SO(3)");
  }
  return r;
}

FrameField reorthonormalize(const FrameField& f) {
  FrameField out = f;
  const std::size_t np = f.points();
  for (std::size_t p = 0; p < np; ++p) {
    const Mat3 x = f.at(p).matrix();
    Mat3 r;
    try {
      r = nearest_rotation(x);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " at grid point " + std::to_string(p));
    }
    out.set(p, Frame::from_matrix(r));
  }
  return out;
}

// ---------------------------------------------------------------- stepping

namespace {

bool finite(const FrameField& f, const VelocityField& v) {
  for (const auto& a : f.n) {
    for (const auto& c : a) {
      if (!c.all_finite()) return false;
    }
  }
  return v[0].all_finite() && v[1].all_finite();
}

/// base + c * rate
void combine(const FrameField& f, const VelocityField& v, const StateRate& k, double c,
             FrameField& fo, VelocityField& vo) {
  fo = f;
  vo = v;
  for (int a = 0; a < 3; ++a) {
    for (int d = 0; d < 3; ++d) fo.n[a][d].axpy(c, k.frame[a][d]);
  }
  for (int i = 0; i < 2; ++i) vo[i].axpy(c, k.velocity[i]);
}

}  // namespace

SimState step(const Spectral& sp, const SimState& s, double dt, const Model& m,
              const StepOptions& opt, StepReport* report) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::kStability, "time step must be positive and finite");
  }
  if (opt.check_cfl) {
    const double limit = cfl_dt(sp.grid(), s.velocity, m, opt.safety);
    if (dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os.precision(17);
      os << "dt = " << dt << " exceeds the CFL bound " << limit << " at step " << s.step
         << ", t = " << s.t;
      throw Error(ErrorKind::kStability, os.str());
    }
  }
  const StateRate k1 = coupled_rhs(sp, s.frame, s.velocity, m);
  FrameField f2, f3, f4;
  VelocityField v2, v3, v4;
  combine(s.frame, s.velocity, k1, 0.5 * dt, f2, v2);
  const StateRate k2 = coupled_rhs(sp, f2, v2, m);
  combine(s.frame, s.velocity, k2, 0.5 * dt, f3, v3);
  const StateRate k3 = coupled_rhs(sp, f3, v3, m);
  combine(s.frame, s.velocity, k3, dt, f4, v4);
  const StateRate k4 = coupled_rhs(sp, f4, v4, m);

  SimState out;
  out.frame = s.frame;
  out.velocity = s.velocity;
  const double w1 = dt / 6.0, w2 = dt / 3.0;
  for (int a = 0; a < 3; ++a) {
    for (int d = 0; d < 3; ++d) {
      ScalarField& x = out.frame.n[a][d];
      x.axpy(w1, k1.frame[a][d]).axpy(w2, k2.frame[a][d]);
      x.axpy(w2, k3.frame[a][d]).axpy(w1, k4.frame[a][d]);
    }
  }
  for (int i = 0; i < 2; ++i) {
    ScalarField& x = out.velocity[i];
    x.axpy(w1, k1.velocity[i]).axpy(w2, k2.velocity[i]);
    x.axpy(w2, k3.velocity[i]).axpy(w1, k4.velocity[i]);
  }
  out.t = s.t + dt;
  out.step = s.step + 1;
  if (!finite(out.frame, out.velocity)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite state after step " << out.step << " (t = " << out.t << ", dt = " << dt
       << ")";
    throw Error(ErrorKind::kDivergence, os.str());
  }
  const double before = report ? max_orthonormality_defect(out.frame) : 0.0;
  out.frame = reorthonormalize(out.frame);
  if (report) {
    report->drift_before = before;
    report->drift_after = max_orthonormality_defect(out.frame);
  }
  return out;
}

// ---------------------------------------------------------------- ledger series

void finish_energy_series(std::vector<EnergyRow>& rows) {
  const std::size_t n = rows.size();
  if (n < 3) {
    for (auto& r : rows) {
      r.ledger.dEdt = 0.0;
      r.ledger.residual = r.ledger.d_total();
    }
    if (n == 2) {
      const double d = (rows[1].ledger.total() - rows[0].ledger.total()) / (rows[1].t - rows[0].t);
      for (auto& r : rows) {
        r.ledger.dEdt = d;
        r.ledger.residual = d + r.ledger.d_total();
      }
    }
    return;
  }
  auto E = [&](std::size_t i) { return rows[i].ledger.total(); };
  const double dt = (rows[n - 1].t - rows[0].t) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (i == 0) {
      d = (-3.0 * E(0) + 4.0 * E(1) - E(2)) / (2.0 * dt);
    } else if (i == n - 1) {
      d = (3.0 * E(n - 1) - 4.0 * E(n - 2) + E(n - 3)) / (2.0 * dt);
    } else {
      d = (E(i + 1) - E(i - 1)) / (2.0 * dt);
    }
    rows[i].ledger.dEdt = d;
    rows[i].ledger.residual = d + rows[i].ledger.d_total();
  }
}

double relative_residual(const EnergyLedger& e, double floor) {
  const double scale = std::max({std::abs(e.dEdt), std::abs(e.d_total()), floor});
  return std::abs(e.residual) / scale;
}

// ---------------------------------------------------------------- runs

double resolve_dt(const Grid2D& g, const SimState& s0, const Model& m, const StepperConfig& rc) {
  if (!(rc.t_end > 0.0)) throw Error(ErrorKind::kConfiguration, "stepper.t_end must be > 0");
  double dt = rc.dt;
  if (dt <= 0.0) dt = rc.cfl_fraction * cfl_dt(g, s0.velocity, m, rc.safety);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::kConfiguration, "could not determine a positive time step");
  }
  // Uniform steps that land exactly on t_end.
  const double steps = std::ceil(rc.t_end / dt - 1e-9);
  return rc.t_end / steps;
}

namespace {

std::uint64_t step_count(const StepperConfig& rc, double dt) {
  return static_cast<std::uint64_t>(std::llround(rc.t_end / dt));
}

MetricRow metric_row(const Spectral& sp, const DyadicPartition& part, const SimState& a,
                     const SimState& b, const Model& m, const WeakMetricConfig& besov) {
  const TwinDiff d = TwinDiff::between(a.frame, a.velocity, b.frame, b.velocity);
  const WeakMetrics w = weak_metrics(sp, part, d, besov);
  MetricRow r;
  r.t = a.t;
  r.Phi = w.Phi;
  r.U = w.U;
  r.V = w.V;
  r.F = regularity_functional(sp, a.frame, a.velocity, b.frame, b.velocity, m.elastic, m.hydro);
  return r;
}

EnergyRow energy_row(const Spectral& sp, const SimState& s, const Model& m) {
  return {s.t, energy_report(sp, s.frame, s.velocity, m.hydro, m.elastic)};
}

void require_run_config(const StepperConfig& rc) {
  if (rc.sample_every < 1) {
    throw Error(ErrorKind::kConfiguration, "stepper.sample_every must be >= 1");
  }
  rc.besov.validate();
}

}  // namespace

RunResult run(const Spectral& sp, const SimState& s0, const Model& m, const StepperConfig& rc,
              const StepObserver& on_step) {
  require_run_config(rc);
  require_valid(m.hydro);
  const DyadicPartition part(sp.grid());
  RunResult res;
  res.dt = resolve_dt(sp.grid(), s0, m, rc);
  const std::uint64_t n = step_count(rc, res.dt);
  StepOptions opt;
  opt.safety = rc.safety;
  SimState s = s0;
  auto sample = [&] {
    res.metrics.push_back(metric_row(sp, part, s, s, m, rc.besov));
  };
  res.energy.push_back(energy_row(sp, s, m));
  if (on_step) on_step(s);
  sample();
  for (std::uint64_t k = 1; k <= n; ++k) {
    s = step(sp, s, res.dt, m, opt);
    res.energy.push_back(energy_row(sp, s, m));
    if (on_step) on_step(s);
    if (k % static_cast<std::uint64_t>(rc.sample_every) == 0 || k == n) sample();
  }
  finish_energy_series(res.energy);
  res.final = std::move(s);
  return res;
}

TwinResult twin_run(const Spectral& sp, const SimState& a0, const SimState& b0, const Model& m,
                    const StepperConfig& rc,
                    const std::function<void(const SimState&, const SimState&)>& on_step) {
  require_run_config(rc);
  require_valid(m.hydro);
  const DyadicPartition part(sp.grid());
  TwinResult res;
  res.dt = resolve_dt(sp.grid(), a0, m, rc);
  const std::uint64_t n = step_count(rc, res.dt);
  StepOptions opt;
  opt.safety = rc.safety;
  SimState a = a0, b = b0;
  auto sample = [&] {
    res.metrics.push_back(metric_row(sp, part, a, b, m, rc.besov));
  };
  res.energy.push_back(energy_row(sp, a, m));
  if (on_step) on_step(a, b);
  sample();
  for (std::uint64_t k = 1; k <= n; ++k) {
    a = step(sp, a, res.dt, m, opt);
    b = step(sp, b, res.dt, m, opt);
    res.energy.push_back(energy_row(sp, a, m));
    if (on_step) on_step(a, b);
    if (k % static_cast<std::uint64_t>(rc.sample_every) == 0 || k == n) sample();
  }
  finish_energy_series(res.energy);
  res.a = std::move(a);
  res.b = std::move(b);
  return res;
}

double gronwall_constant(const std::vector<MetricRow>& rows) {
  if (rows.size() < 2 || !(rows.front().Phi > 0.0)) {
    throw Error(ErrorKind::kUndefinedRatio, "Gronwall fit needs Phi(0) > 0 and two samples");
  }
  const double log0 = std::log(rows.front().Phi);
  double integral = 0.0;
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    integral += 0.5 * (rows[i].F + rows[i - 1].F) * (rows[i].t - rows[i - 1].t);
    if (integral > 0.0 && rows[i].Phi > 0.0) {
      c = std::max(c, (std::log(rows[i].Phi) - log0) / integral);
    }
  }
  return c;
}

}  // namespace biaxframe
