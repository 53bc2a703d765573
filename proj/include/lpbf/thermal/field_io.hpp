#pragma once

#include <filesystem>
#include <cstdint>
#include <iosfwd>

#include "lpbf/thermal/grid.hpp"

namespace lpbf::thermal {

/// Binary snapshot layout (little-endian):
///   "MSRL" | u32 version | u32 nx | u32 ny | u32 nz | f64 dx_um |
///   nx*ny*nz f64 temperatures, x fastest, then y, then z.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const TemperatureField& field);
void write_snapshot(const std::filesystem::path& path, const TemperatureField& field);

/// Reads a snapshot; the lateral origin is not stored and is set to `origin`.
TemperatureField read_snapshot(std::istream& in, Vec2 origin_um = {0.0, 0.0});
TemperatureField read_snapshot(const std::filesystem::path& path, Vec2 origin_um = {0.0, 0.0});

/// Top-layer slice as CSV with header `i,j,x_um,y_um,T_K`.
void write_surface_csv(std::ostream& out, const TemperatureField& field);
void write_surface_csv(const std::filesystem::path& path, const TemperatureField& field);

}  // namespace lpbf::thermal
