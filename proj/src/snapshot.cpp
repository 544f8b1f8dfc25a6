#include "biaxframe/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "biaxframe/error.hpp"

namespace biaxframe {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "biaxframe-snapshot";
constexpr std::size_t kComponents = 11;

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

json layout() {
  return json::array({"n1x", "n1y", "n1z", "n2x", "n2y", "n2z", "n3x", "n3y", "n3z", "vx", "vy"});
}

std::vector<const ScalarField*> components(const SimState& s) {
  std::vector<const ScalarField*> out;
  for (const auto& a : s.frame.n) {
    for (const auto& c : a) out.push_back(&c);
  }
  out.push_back(&s.velocity[0]);
  out.push_back(&s.velocity[1]);
  return out;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Grid2D& g, const SimState& s,
                    const json& params) {
  require_shape(s.frame, g, "write_snapshot");
  require_shape(s.velocity[0], g, "write_snapshot");
  require_shape(s.velocity[1], g, "write_snapshot");
  const json header = {{"format", kFormat},
                       {"version", kSnapshotVersion},
                       {"grid", {{"n", g.n()}, {"L", g.length()}}},
                       {"params", params},
                       {"t", s.t},
                       {"step", s.step},
                       {"layout", layout()},
                       {"endianness", "little"},
                       {"count", kComponents * g.points()}};
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  const std::uint64_t len = to_little<std::uint64_t>(text.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  std::vector<double> buf(g.points());
  for (const ScalarField* c : components(s)) {
    for (std::size_t p = 0; p < buf.size(); ++p) buf[p] = to_little((*c)[p]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  }
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open snapshot " + path.string());
  const std::string where = path.string() + ": ";
  std::uint64_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len))) {
    throw Error(ErrorKind::kFormat, where + "missing header length");
  }
  len = to_little(len);
  if (len == 0 || len > (1u << 24)) {
    throw Error(ErrorKind::kFormat, where + "implausible header length " + std::to_string(len));
  }
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw Error(ErrorKind::kFormat, where + "truncated header");
  }
  json h;
  try {
    h = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, where + "corrupt header: " + e.what());
  }
  Snapshot snap;
  std::size_t count = 0;
  try {
    if (h.at("format").get<std::string>() != kFormat) {
      throw Error(ErrorKind::kFormat, where + "not a snapshot file");
    }
    const int version = h.at("version").get<int>();
    if (version != kSnapshotVersion) {
      throw Error(ErrorKind::kFormat, where + "unsupported snapshot version " +
                                          std::to_string(version) + " (expected " +
                                          std::to_string(kSnapshotVersion) + ")");
    }
    if (h.at("endianness").get<std::string>() != "little") {
      throw Error(ErrorKind::kFormat, where + "unsupported endianness");
    }
    if (h.at("layout") != layout()) throw Error(ErrorKind::kFormat, where + "unexpected layout");
    snap.grid = Grid2D(h.at("grid").at("n").get<std::size_t>(), h.at("grid").at("L").get<double>());
    snap.state.t = h.at("t").get<double>();
    snap.state.step = h.at("step").get<std::uint64_t>();
    snap.params = h.value("params", json::object());
    count = h.at("count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, where + "corrupt header: " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kFormat) throw;
    throw Error(ErrorKind::kFormat, where + e.what());
  }
  const Grid2D& g = snap.grid;
  if (count != kComponents * g.points()) {
    throw Error(ErrorKind::kFormat, where + "header count " + std::to_string(count) +
                                        " does not match the grid");
  }
  snap.state.frame = FrameField(g);
  snap.state.velocity = make_vec2(g);
  std::vector<ScalarField*> dst;
  for (auto& a : snap.state.frame.n) {
    for (auto& c : a) dst.push_back(&c);
  }
  dst.push_back(&snap.state.velocity[0]);
  dst.push_back(&snap.state.velocity[1]);
  for (ScalarField* c : dst) {
    if (!in.read(reinterpret_cast<char*>(c->data()),
                 static_cast<std::streamsize>(g.points() * sizeof(double)))) {
      throw Error(ErrorKind::kFormat, where + "payload length mismatch: file shorter than " +
                                          std::to_string(count * 8) + " bytes");
    }
    for (std::size_t p = 0; p < g.points(); ++p) (*c)[p] = to_little((*c)[p]);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::kFormat, where + "payload length mismatch: trailing bytes");
  }
  return snap;
}

}  // namespace biaxframe
