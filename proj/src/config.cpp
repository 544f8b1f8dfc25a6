#include "biaxframe/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "biaxframe/error.hpp"
#include "biaxframe/initial_data.hpp"
#include "biaxframe/snapshot.hpp"

namespace biaxframe {

using nlohmann::json;

namespace {

/// Walks one JSON object, recording problems instead of throwing.
class Section {
 public:
  Section(const json* node, std::string path, std::vector<std::string>& errors,
          std::set<std::string> known)
      : node_(node), path_(std::move(path)), errors_(errors), known_(std::move(known)) {
    if (node_ && !node_->is_object()) {
      fail("", "expected an object");
      node_ = nullptr;
    }
    if (node_) {
      for (const auto& [key, value] : node_->items()) {
        if (!known_.count(key)) fail(key, "unknown key");
      }
    }
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }
  const json* child(const std::string& key) const {
    return has(key) ? &node_->at(key) : nullptr;
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  void fail(const std::string& k, const std::string& msg) const {
    errors_.push_back((k.empty() ? path_ : key(k)) + ": " + msg);
  }

  template <class T>
  void number(const std::string& k, T& out, bool required) const {
    if (!has(k)) {
      if (required) fail(k, "missing required key");
      return;
    }
    const json& v = node_->at(k);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        fail(k, "expected an integer");
        return;
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<long long>() < 0) {
          fail(k, "expected a nonnegative integer");
          return;
        }
      }
      out = v.get<T>();
    } else {
      if (!v.is_number()) {
        fail(k, "expected a number");
        return;
      }
      out = v.get<T>();
    }
  }

  void string(const std::string& k, std::string& out) const {
    if (!has(k)) return;
    const json& v = node_->at(k);
    if (!v.is_string()) {
      fail(k, "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  template <std::size_t N>
  void numbers(const std::string& k, std::array<double, N>& out, bool required) const {
    if (!has(k)) {
      if (required) fail(k, "missing required key");
      return;
    }
    const json& v = node_->at(k);
    if (!v.is_array()) {
      fail(k, "expected an array of " + std::to_string(N) + " numbers");
      return;
    }
    if (v.size() != N) {
      fail(k, "expected " + std::to_string(N) + " entries, got " + std::to_string(v.size()));
      return;
    }
    for (std::size_t i = 0; i < N; ++i) {
      if (!v[i].is_number()) {
        fail(k + "[" + std::to_string(i) + "]", "expected a number");
        return;
      }
      out[i] = v[i].get<double>();
    }
  }

 private:
  const json* node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> known_;
};

bool power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

}  // namespace

RunConfig parse_config(const json& j) {
  std::vector<std::string> errors;
  RunConfig c;
  const Section root(&j, "", errors,
                     {"grid", "elastic", "hydro", "stepper", "initial", "seed", "output", "besov"});

  if (!root.has("grid")) root.fail("grid", "missing required key");
  const Section grid(root.child("grid"), "grid", errors, {"n", "L"});
  grid.number("n", c.n, true);
  grid.number("L", c.length, true);
  if (grid.has("n") && (c.n < 16 || !power_of_two(c.n))) {
    grid.fail("n", "expected a power of two >= 16, got " + std::to_string(c.n));
  }
  if (grid.has("L") && !(c.length > 0.0 && std::isfinite(c.length))) grid.fail("L", "must be > 0");

  if (!root.has("elastic")) root.fail("elastic", "missing required key");
  const Section elastic(root.child("elastic"), "elastic", errors, {"K"});
  const std::size_t before = errors.size();
  elastic.numbers("K", c.K, root.has("elastic"));
  if (errors.size() == before && elastic.has("K")) {
    for (std::size_t i = 0; i < 12; ++i) {
      if (!(c.K[i] > 0.0) || !std::isfinite(c.K[i])) {
        elastic.fail("K[" + std::to_string(i) + "]", "K" + std::to_string(i + 1) +
                                                         " must be positive");
      }
    }
  }

  if (!root.has("hydro")) root.fail("hydro", "missing required key");
  const Section hydro(root.child("hydro"), "hydro", errors,
                      {"eta", "beta0", "beta1", "beta2", "beta3", "beta4", "beta5", "chi",
                       "eta_rot"});
  const bool need_hydro = root.has("hydro");
  const std::size_t hydro_before = errors.size();
  hydro.number("eta", c.hydro.eta, need_hydro);
  for (int i = 0; i < 6; ++i) hydro.number("beta" + std::to_string(i), c.hydro.beta[i], need_hydro);
  hydro.numbers("chi", c.hydro.chi, need_hydro);
  hydro.numbers("eta_rot", c.hydro.eta_rot, need_hydro);
  if (errors.size() == hydro_before && need_hydro) {
    for (const auto& v : validate(c.hydro)) {
      errors.push_back(v.key + ": violates " + v.inequality + " (" + v.detail + ")");
    }
  }

  const Section stepper(root.child("stepper"), "stepper", errors,
                        {"dt", "cfl_fraction", "safety", "t_end", "sample_every"});
  auto& st = c.stepper;
  stepper.number("dt", st.dt, false);
  stepper.number("cfl_fraction", st.cfl_fraction, false);
  stepper.number("safety", st.safety, false);
  stepper.number("t_end", st.t_end, false);
  stepper.number("sample_every", st.sample_every, false);
  if (!(st.dt >= 0.0) || !std::isfinite(st.dt)) stepper.fail("dt", "must be >= 0 (0 = from CFL)");
  if (!(st.cfl_fraction > 0.0 && st.cfl_fraction <= 1.0)) {
    stepper.fail("cfl_fraction", "expected 0 < cfl_fraction <= 1");
  }
  if (!(st.safety > 0.0) || !std::isfinite(st.safety)) stepper.fail("safety", "must be > 0");
  if (!(st.t_end > 0.0) || !std::isfinite(st.t_end)) stepper.fail("t_end", "must be > 0");
  if (st.sample_every < 1) stepper.fail("sample_every", "must be >= 1");

  const Section besov(root.child("besov"), "besov", errors, {"s"});
  besov.number("s", st.besov.s, false);
  if (!(st.besov.s > 0.0 && st.besov.s < 0.5)) besov.fail("s", "expected 0 < s < 1/2");

  const Section initial(root.child("initial"), "initial", errors, {"frame", "velocity", "snapshot"});
  initial.string("snapshot", c.initial.snapshot);
  const Section fi(initial.child("frame"), "initial.frame", errors, {"type", "amplitude", "modes"});
  fi.string("type", c.initial.frame.type);
  fi.number("amplitude", c.initial.frame.amplitude, false);
  fi.number("modes", c.initial.frame.modes, false);
  if (c.initial.frame.type != "uniform" && c.initial.frame.type != "random_rotation") {
    fi.fail("type", "expected \"uniform\" or \"random_rotation\", got \"" + c.initial.frame.type +
                        "\"");
  }
  if (!(c.initial.frame.amplitude >= 0.0)) fi.fail("amplitude", "must be >= 0");
  if (c.initial.frame.modes < 1) fi.fail("modes", "must be >= 1");
  const Section vi(initial.child("velocity"), "initial.velocity", errors,
                   {"type", "amplitude", "modes"});
  vi.string("type", c.initial.velocity.type);
  vi.number("amplitude", c.initial.velocity.amplitude, false);
  vi.number("modes", c.initial.velocity.modes, false);
  const auto& vt = c.initial.velocity.type;
  if (vt != "zero" && vt != "taylor_green" && vt != "random") {
    vi.fail("type", "expected \"zero\", \"taylor_green\" or \"random\", got \"" + vt + "\"");
  }
  if (!(c.initial.velocity.amplitude >= 0.0)) vi.fail("amplitude", "must be >= 0");
  if (c.initial.velocity.modes < 1) vi.fail("modes", "must be >= 1");

  root.number("seed", c.seed, false);

  const Section out(root.child("output"), "output", errors, {"dir", "snapshot_every"});
  out.string("dir", c.output.dir);
  out.number("snapshot_every", c.output.snapshot_every, false);
  if (c.output.snapshot_every < 0) out.fail("snapshot_every", "must be >= 0");

  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid configuration (" << errors.size() << " problem"
       << (errors.size() == 1 ? "" : "s") << "):";
    for (const auto& e : errors) os << "\n  " << e;
    throw Error(ErrorKind::kConfiguration, os.str());
  }
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfiguration, path.string() + ": not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json RunConfig::to_json() const {
  json j;
  j["grid"] = {{"n", n}, {"L", length}};
  j["elastic"] = {{"K", K}};
  j["hydro"] = {{"eta", hydro.eta},         {"beta0", hydro.beta[0]}, {"beta1", hydro.beta[1]},
                {"beta2", hydro.beta[2]},   {"beta3", hydro.beta[3]}, {"beta4", hydro.beta[4]},
                {"beta5", hydro.beta[5]},   {"chi", hydro.chi},       {"eta_rot", hydro.eta_rot}};
  j["stepper"] = {{"dt", stepper.dt},
                  {"cfl_fraction", stepper.cfl_fraction},
                  {"safety", stepper.safety},
                  {"t_end", stepper.t_end},
                  {"sample_every", stepper.sample_every}};
  j["besov"] = {{"s", stepper.besov.s}};
  j["initial"] = {
      {"frame",
       {{"type", initial.frame.type},
        {"amplitude", initial.frame.amplitude},
        {"modes", initial.frame.modes}}},
      {"velocity",
       {{"type", initial.velocity.type},
        {"amplitude", initial.velocity.amplitude},
        {"modes", initial.velocity.modes}}}};
  if (!initial.snapshot.empty()) j["initial"]["snapshot"] = initial.snapshot;
  j["seed"] = seed;
  j["output"] = {{"dir", output.dir}, {"snapshot_every", output.snapshot_every}};
  return j;
}

SimState initial_state(const RunConfig& cfg, const Spectral& sp) {
  const Grid2D& g = sp.grid();
  if (!cfg.initial.snapshot.empty()) {
    Snapshot snap = read_snapshot(cfg.initial.snapshot);
    if (!(snap.grid == g)) {
      throw Error(ErrorKind::kConfiguration,
                  "initial.snapshot: grid of " + cfg.initial.snapshot + " differs from grid");
    }
    return std::move(snap.state);
  }
  SimState s;
  const auto& fi = cfg.initial.frame;
  if (fi.type == "uniform") {
    s.frame = FrameField::uniform(g, Frame::identity());
  } else {
    s.frame = random_rotation_frame(g, Frame::identity(), fi.amplitude, fi.modes, cfg.seed);
  }
  const auto& vi = cfg.initial.velocity;
  if (vi.type == "zero") {
    s.velocity = make_vec2(g);
  } else if (vi.type == "taylor_green") {
    s.velocity = taylor_green(g, vi.amplitude, vi.modes);
  } else {
    s.velocity = random_divfree_velocity(sp, vi.amplitude, vi.modes, cfg.seed + 1000003);
  }
  return s;
}

}  // namespace biaxframe
