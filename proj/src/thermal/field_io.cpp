#include "lpbf/thermal/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <string_view>

#include "lpbf/io/binary.hpp"

namespace lpbf::thermal {

void write_snapshot(std::ostream& out, const TemperatureField& field) {
  const GridSpec& g = field.grid();
  out.write("MSRL", 4);
  io::write_le<std::uint32_t>(out, kSnapshotVersion);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.nz));
  io::write_le<double>(out, g.dx_um);
  for (double t : field.values()) io::write_le<double>(out, t);
  if (!out) throw Error("failed to write snapshot");
}

void write_snapshot(const std::filesystem::path& path, const TemperatureField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  write_snapshot(out, field);
}

TemperatureField read_snapshot(std::istream& in, Vec2 origin) {
  io::expect_magic(in, "MSRL");
  const auto version = io::read_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) throw Error("unsupported snapshot version");
  GridSpec g;
  g.nx = static_cast<int>(io::read_le<std::uint32_t>(in));
  g.ny = static_cast<int>(io::read_le<std::uint32_t>(in));
  g.nz = static_cast<int>(io::read_le<std::uint32_t>(in));
  g.dx_um = io::read_le<double>(in);
  g.origin_um = origin;
  TemperatureField field(g, 0.0);
  for (double& t : field.values()) t = io::read_le<double>(in);
  return field;
}

TemperatureField read_snapshot(const std::filesystem::path& path, Vec2 origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_snapshot(in, origin);
}

void write_surface_csv(std::ostream& out, const TemperatureField& field) {
  const GridSpec& g = field.grid();
  out << "i,j,x_um,y_um,T_K\n" << std::setprecision(10);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << i << ',' << j << ',' << g.x_center(i) << ',' << g.y_center(j) << ',' << field.at(i, j, 0)
          << '\n';
}

void write_surface_csv(const std::filesystem::path& path, const TemperatureField& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  write_surface_csv(out, field);
}

}  // namespace lpbf::thermal
