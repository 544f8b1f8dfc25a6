#pragma once

// Snapshot files: an 8-byte little-endian header length, a JSON header, and
// a little-endian float64 payload. The payload holds the nine frame
// components (n1x n1y n1z n2x ... n3z) and then vx, vy, each row-major.

#include <filesystem>

#include <json.hpp>

#include "biaxframe/simulation.hpp"
#include "biaxframe/spectral_field.hpp"

namespace biaxframe {

inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
  Grid2D grid{16, 1.0};
  SimState state;
  nlohmann::json params;  // free-form provenance
};

/// Throws Error(kIo) on write failure.
void write_snapshot(const std::filesystem::path& path, const Grid2D& g, const SimState& s,
                    const nlohmann::json& params = nlohmann::json::object());
/// Throws Error(kIo) if unreadable, Error(kFormat) on a malformed header,
/// unsupported version or payload-length mismatch.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace biaxframe
