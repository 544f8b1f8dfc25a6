#include "biaxframe/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "biaxframe/config.hpp"
#include "biaxframe/error.hpp"
#include "biaxframe/initial_data.hpp"
#include "biaxframe/littlewood_paley.hpp"
#include "biaxframe/simulation.hpp"
#include "biaxframe/snapshot.hpp"

namespace biaxframe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kParameter:
      return 2;
    case ErrorKind::kDivergence:
    case ErrorKind::kStability:
    case ErrorKind::kDegeneracy:
      return 3;
    case ErrorKind::kIo:
    case ErrorKind::kFormat:
      return 4;
    default:
      return 1;
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

void write_energy_csv(const fs::path& p, const std::vector<EnergyRow>& rows) {
  auto out = open_out(p);
  out << "t,kinetic,elastic,total,dEdt,d_visc,d_rot1,d_rot2,d_rot3,d_beta12,d_s3,d_s4,d_s5,"
         "d_total,residual\n";
  for (const auto& r : rows) {
    const auto& e = r.ledger;
    out << r.t << ',' << e.kinetic << ',' << e.elastic << ',' << e.total() << ',' << e.dEdt << ','
        << e.d_visc << ',' << e.d_rot[0] << ',' << e.d_rot[1] << ',' << e.d_rot[2] << ','
        << e.d_beta12 << ',' << e.d_s3 << ',' << e.d_s4 << ',' << e.d_s5 << ',' << e.d_total()
        << ',' << e.residual << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + p.string());
}

void write_metrics_csv(const fs::path& p, const std::vector<MetricRow>& rows) {
  auto out = open_out(p);
  out << "t,Phi,U,V,F\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.Phi << ',' << r.U << ',' << r.V << ',' << r.F << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + p.string());
}

void write_resolved(const fs::path& dir, const RunConfig& cfg, const json& extra = {}) {
  json j = cfg.to_json();
  if (!extra.is_null()) j["cli"] = extra;
  auto out = open_out(dir / "config.resolved.json");
  out << j.dump(2) << '\n';
}

std::string snap_name(const std::string& prefix, std::uint64_t step) {
  std::ostringstream os;
  os << prefix << std::setw(8) << std::setfill('0') << step << ".bin";
  return os.str();
}

bool snapshot_due(const RunConfig& cfg, std::uint64_t step) {
  const int every = cfg.output.snapshot_every;
  return step == 0 || (every > 0 && step % static_cast<std::uint64_t>(every) == 0);
}

double max_residual(const std::vector<EnergyRow>& rows) {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, relative_residual(r.ledger));
  return worst;
}

int cmd_check(const std::string& path) {
  const RunConfig cfg = parse_config_file(path);
  const ElasticParams ep = cfg.elastic();
  const auto& h = cfg.hydro;
  const auto& b = h.beta;
  std::cout << std::setprecision(17);
  std::cout << "coefficients admissible\n";
  std::cout << "  beta0^2 <= beta1*beta2 : " << b[0] * b[0] << " <= " << b[1] * b[2] << '\n';
  const int partner[3] = {5, 4, 3};
  for (int k = 0; k < 3; ++k) {
    std::cout << "  eta" << k + 1 << "^2 <= beta" << partner[k] << "*chi" << k + 1 << " : "
              << h.eta_rot[k] * h.eta_rot[k] << " <= " << b[partner[k]] * h.chi[k] << '\n';
  }
  std::cout << "  eta > 0 : " << h.eta << '\n';
  std::cout << "elastic split\n";
  std::cout << "  gamma = " << ep.gamma[0] << ", " << ep.gamma[1] << ", " << ep.gamma[2] << '\n';
  std::cout << "  k     = " << ep.k[0] << ", " << ep.k[1] << ", " << ep.k[2] << '\n';
  for (int i = 0; i < 3; ++i) {
    std::cout << "  k" << i + 1 << "j   = " << ep.kk[i][0] << ", " << ep.kk[i][1] << ", "
              << ep.kk[i][2] << '\n';
  }
  return 0;
}

int cmd_run(const std::string& path, const std::string& out_override) {
  RunConfig cfg = parse_config_file(path);
  if (!out_override.empty()) cfg.output.dir = out_override;
  const Grid2D g = cfg.grid();
  const Spectral sp(g);
  const Model m = cfg.model();
  const fs::path dir = cfg.output.dir;
  make_dir(dir);
  write_resolved(dir, cfg);
  const json params = cfg.to_json();
  const SimState s0 = initial_state(cfg, sp);
  const double dt = resolve_dt(g, s0, m, cfg.stepper);
  const std::uint64_t last = static_cast<std::uint64_t>(std::llround(cfg.stepper.t_end / dt));
  RunResult res = run(sp, s0, m, cfg.stepper, [&](const SimState& s) {
    if (snapshot_due(cfg, s.step) || s.step == last) {
      write_snapshot(dir / snap_name("snap_", s.step), g, s, params);
    }
  });
  write_energy_csv(dir / "energy.csv", res.energy);
  write_metrics_csv(dir / "metrics.csv", res.metrics);
  std::cout << std::setprecision(6) << "run complete: " << res.final.step << " steps, dt = " << dt
            << ", E(0) = " << res.energy.front().ledger.total()
            << ", E(end) = " << res.energy.back().ledger.total()
            << ", max relative residual = " << max_residual(res.energy) << "\n"
            << "output: " << dir.string() << '\n';
  return 0;
}

int cmd_twin(const std::string& path, double eps, const std::string& out_override) {
  RunConfig cfg = parse_config_file(path);
  if (!out_override.empty()) cfg.output.dir = out_override;
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorKind::kConfiguration, "--eps must be a finite number >= 0");
  }
  const Grid2D g = cfg.grid();
  const Spectral sp(g);
  const Model m = cfg.model();
  const fs::path dir = cfg.output.dir;
  make_dir(dir);
  write_resolved(dir, cfg, json{{"command", "twin"}, {"eps", eps}});
  const json params = cfg.to_json();
  const SimState a0 = initial_state(cfg, sp);
  SimState b0 = a0;
  perturb(sp, b0.frame, b0.velocity, eps, cfg.initial.frame.modes, cfg.seed + 77);
  const double dt = resolve_dt(g, a0, m, cfg.stepper);
  const std::uint64_t last = static_cast<std::uint64_t>(std::llround(cfg.stepper.t_end / dt));
  TwinResult res = twin_run(sp, a0, b0, m, cfg.stepper, [&](const SimState& a, const SimState& b) {
    if (snapshot_due(cfg, a.step) || a.step == last) {
      write_snapshot(dir / snap_name("a_", a.step), g, a, params);
      write_snapshot(dir / snap_name("b_", b.step), g, b, params);
    }
  });
  write_energy_csv(dir / "energy.csv", res.energy);
  write_metrics_csv(dir / "metrics.csv", res.metrics);
  std::cout << std::setprecision(6) << "twin complete: " << res.a.step << " steps, dt = " << dt
            << ", Phi(0) = " << res.metrics.front().Phi
            << ", Phi(end) = " << res.metrics.back().Phi << "\n";
  if (res.metrics.front().Phi > 0.0) {
    std::cout << "fitted Gronwall constant C = " << gronwall_constant(res.metrics) << '\n';
  }
  std::cout << "output: " << dir.string() << '\n';
  return 0;
}

int cmd_lp(const std::string& a_path, const std::string& b_path, double s,
           const std::string& blocks_path) {
  WeakMetricConfig cfg{s};
  cfg.validate();
  const Snapshot a = read_snapshot(a_path);
  const Snapshot b = read_snapshot(b_path);
  if (!(a.grid == b.grid)) {
    throw Error(ErrorKind::kConfiguration, "snapshots live on different grids");
  }
  const Spectral sp(a.grid);
  const DyadicPartition part(a.grid);
  const TwinDiff d = TwinDiff::between(a.state.frame, a.state.velocity, b.state.frame,
                                       b.state.velocity);
  const WeakMetrics w = weak_metrics(sp, part, d, cfg);
  std::cout << std::setprecision(17) << "s,V,U,Phi\n"
            << s << ',' << w.V << ',' << w.U << ',' << w.Phi << '\n';
  if (!blocks_path.empty()) {
    const auto ev = block_energies(sp, part, d.velocity_components());
    const auto ef = block_energies(sp, part, d.frame_components());
    auto out = open_out(blocks_path);
    out << "j,dv_l2sq,dF_l2sq\n";
    for (int j = -1; j <= part.j_max(); ++j) {
      const auto k = static_cast<std::size_t>(j + 1);
      out << j << ',' << ev[k] << ',' << ef[k] << '\n';
    }
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + blocks_path);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Biaxial frame hydrodynamics: spectral solver and uniqueness diagnostics"};
  app.require_subcommand(1);

  std::string cfg_path, out_dir, snap_a, snap_b, blocks;
  double eps = 0.0, s = 0.25;

  auto* check = app.add_subcommand("check-coeffs", "validate a config and print the inequalities");
  check->add_option("config", cfg_path, "JSON config")->required();

  auto* run_cmd = app.add_subcommand("run", "integrate one trajectory");
  run_cmd->add_option("config", cfg_path, "JSON config")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");

  auto* twin = app.add_subcommand("twin", "integrate a state and its eps-perturbation");
  twin->add_option("config", cfg_path, "JSON config")->required();
  twin->add_option("--eps", eps, "perturbation amplitude")->required();
  twin->add_option("--out", out_dir, "output directory (overrides output.dir)");

  auto* lp = app.add_subcommand("lp-analyze", "weak metrics between two snapshots");
  lp->add_option("a", snap_a, "snapshot A")->required();
  lp->add_option("b", snap_b, "snapshot B")->required();
  lp->add_option("--s", s, "Besov index, 0 < s < 1/2");
  lp->add_option("--blocks", blocks, "write per-block energies to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(cfg_path);
    if (*run_cmd) return cmd_run(cfg_path, out_dir);
    if (*twin) return cmd_twin(cfg_path, eps, out_dir);
    if (*lp) return cmd_lp(snap_a, snap_b, s, blocks);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace biaxframe
