#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lzs/config.hpp"
#include "lzs/sweep_engine.hpp"

namespace lzs {

/// 9 significant digits; NaN as "nan", infinities as "inf"/"-inf".
std::string format_number(double v);

std::string_view to_string(MapKind kind);

/// "relativistic|unconverged" style flag list, "-" when empty.
std::string flag_text(std::uint32_t flags);

/// map.csv content: "# key: value" provenance lines, then the header
/// gamma,M,E0_Vnm,rho_cb_res,j_res_e_per_fs,regime,flags and one row per cell
/// with gamma as the outer and M as the inner loop.
std::string map_csv(const MapResult& map, const RunConfig& cfg);

/// Resolved configuration preceded by "# " metadata lines; parse_config
/// accepts it unchanged.
std::string manifest_text(const RunConfig& cfg, std::string_view command,
                          const std::vector<std::string>& metadata);

/// Metadata lines describing a finished or partial map.
std::vector<std::string> map_metadata(const MapResult& map);

/// Writes map.csv and manifest.txt into `dir` (created if missing).
void emit_map(const MapResult& map, const RunConfig& cfg, const std::filesystem::path& dir,
              std::string_view command, const std::vector<std::string>& extra_metadata = {});

/// Writes `content` to `path`, creating parent directories; throws std::runtime_error.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace lzs
