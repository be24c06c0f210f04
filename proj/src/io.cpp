#include "lzs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lzs/version.hpp"

namespace lzs {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string_view to_string(MapKind kind) {
  return kind == MapKind::Current ? "current" : "population";
}

std::string flag_text(std::uint32_t flags) {
  std::string out;
  auto add = [&](std::string_view s) {
    if (!out.empty()) out += '|';
    out += s;
  };
  if (flags & kFlagRelativistic) add("relativistic");
  if (flags & kFlagUnconverged) add("unconverged");
  return out.empty() ? "-" : out;
}

namespace {

std::string hash_text(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string map_csv(const MapResult& map, const RunConfig& cfg) {
  const GridSpec& g = map.grid;
  std::ostringstream out;
  out << "# kind: " << to_string(map.kind) << '\n'
      << "# version: " << kVersion << '\n'
      << "# config_hash: " << hash_text(config_hash(cfg)) << '\n'
      << "# gamma_axis: log " << format_number(g.gamma.min) << ' ' << format_number(g.gamma.max)
      << ' ' << g.gamma.count << '\n'
      << "# m_axis: linear " << format_number(g.m.min) << ' ' << format_number(g.m.max) << ' '
      << g.m.count << '\n'
      << "# photon_energy_eV: " << format_number(g.pulse.photon_energy) << '\n'
      << "# row_order: gamma outer, M inner\n"
      << "gamma,M,E0_Vnm,rho_cb_res,j_res_e_per_fs,regime,flags\n";
  for (const MapCell& c : map.cells) {
    const bool ok = c.status == CellStatus::Done;
    out << format_number(c.gamma) << ',' << format_number(c.m) << ',' << format_number(c.e0) << ','
        << format_number(ok ? c.rho_cb_res : std::nan("")) << ','
        << format_number(ok ? c.j_res : std::nan("")) << ','
        << (c.status == CellStatus::Failed   ? std::string_view("FAILED")
            : c.status == CellStatus::Pending ? std::string_view("PENDING")
                                              : to_string(c.regime))
        << ',' << flag_text(c.flags) << '\n';
  }
  return out.str();
}

std::vector<std::string> map_metadata(const MapResult& map) {
  std::vector<std::string> md;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", map.wall_seconds);
  md.push_back("map_kind: " + std::string(to_string(map.kind)));
  md.push_back("wall_time_s: " + std::string(buf));
  md.push_back("cells: " + std::to_string(map.cells.size()) + " total, " +
               std::to_string(map.completed()) + " completed, " + std::to_string(map.failed()) +
               " failed, " + std::to_string(map.pending()) + " pending, " +
               std::to_string(map.resumed_cells) + " from checkpoint");
  if (map.kind == MapKind::Current) {
    double kmin = INFINITY, kmax = 0.0;
    std::uint32_t pmin = UINT32_MAX, pmax = 0;
    std::size_t unconverged = 0;
    for (const MapCell& c : map.cells) {
      if (c.status != CellStatus::Done) continue;
      kmin = std::min(kmin, c.k_half_width);
      kmax = std::max(kmax, c.k_half_width);
      pmin = std::min(pmin, c.k_points);
      pmax = std::max(pmax, c.k_points);
      if (c.flags & kFlagUnconverged) ++unconverged;
    }
    if (pmax > 0) {
      md.push_back("k0_half_width_per_nm: " + format_number(kmin) + " .. " + format_number(kmax));
      md.push_back("k0_points: " + std::to_string(pmin) + " .. " + std::to_string(pmax));
      md.push_back("k0_unconverged_cells: " + std::to_string(unconverged));
    }
  }
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const MapCell& c = map.cells[i];
    if (c.status != CellStatus::Failed) continue;
    md.push_back("failed_cell: index=" + std::to_string(i) + " gamma=" + format_number(c.gamma) +
                 " M=" + format_number(c.m) + " reason=" + c.reason);
  }
  return md;
}

std::string manifest_text(const RunConfig& cfg, std::string_view command,
                          const std::vector<std::string>& metadata) {
  std::ostringstream out;
  out << "# lzs run manifest\n"
      << "# version: " << kVersion << '\n'
      << "# command: " << command << '\n'
      << "# config_hash: " << hash_text(config_hash(cfg)) << '\n';
  for (const std::string& line : metadata) {
    std::string safe = line;
    std::replace(safe.begin(), safe.end(), '\n', ' ');
    out << "# " << safe << '\n';
  }
  out << canonical_text(cfg);
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

void emit_map(const MapResult& map, const RunConfig& cfg, const std::filesystem::path& dir,
              std::string_view command, const std::vector<std::string>& extra_metadata) {
  write_text_file(dir / "map.csv", map_csv(map, cfg));
  std::vector<std::string> md = map_metadata(map);
  md.insert(md.end(), extra_metadata.begin(), extra_metadata.end());
  write_text_file(dir / "manifest.txt", manifest_text(cfg, command, md));
}

}  // namespace lzs
