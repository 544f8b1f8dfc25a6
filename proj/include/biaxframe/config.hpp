#pragma once

// JSON run configuration. Parsing collects every problem before failing, so
// one Error(kConfiguration) reports all offending key paths at once.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "biaxframe/elasticity.hpp"
#include "biaxframe/hydrodynamics.hpp"
#include "biaxframe/simulation.hpp"

namespace biaxframe {

struct FrameInit {
  std::string type = "random_rotation";  // "uniform" | "random_rotation"
  double amplitude = 0.5;                // max rotation angle, radians
  int modes = 4;
};

struct VelocityInit {
  std::string type = "random";  // "zero" | "taylor_green" | "random"
  double amplitude = 1.0;
  int modes = 4;
};

struct InitialConfig {
  FrameInit frame;
  VelocityInit velocity;
  std::string snapshot;  // overrides the generators when set
};

struct OutputConfig {
  std::string dir = "out";
  int snapshot_every = 0;  // steps between snapshots; 0 writes first and last only
};

struct RunConfig {
  std::size_t n = 64;
  double length = 6.283185307179586;
  std::array<double, 12> K{};
  HydroParams hydro;
  StepperConfig stepper;  // besov.s lives here
  InitialConfig initial;
  std::uint64_t seed = 0;
  OutputConfig output;

  Grid2D grid() const { return Grid2D(n, length); }
  ElasticParams elastic() const { return split_constants(K); }
  Model model() const { return {elastic(), hydro}; }

  /// Every field after defaults, in the input schema.
  nlohmann::json to_json() const;
};

RunConfig parse_config(const nlohmann::json& j);
/// Throws Error(kIo) if the file cannot be read.
RunConfig parse_config_file(const std::filesystem::path& path);

/// Initial state from the generators or the referenced snapshot.
SimState initial_state(const RunConfig& cfg, const Spectral& sp);

}  // namespace biaxframe
