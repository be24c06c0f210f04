#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "lzs/core_model.hpp"
#include "lzs/errors.hpp"
#include "lzs/pulse.hpp"
#include "lzs/sweep_engine.hpp"

namespace lzs {

/// Parse error carrying the 1-based position of the offending text.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& what, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct RunConfig {
  MaterialSpec material{1.55, 1.0};
  PulseSpec pulse;
  double t2 = std::numeric_limits<double>::infinity();

  // Working point for trace/regimes; both NaN means "use material.gap and pulse.peak_field".
  double point_gamma = std::numeric_limits<double>::quiet_NaN();
  double point_m = std::numeric_limits<double>::quiet_NaN();
  double point_k0 = 0.0;

  GridSpec grid;  // pulse, t2, v_F and thresholds are filled from the fields above
  std::size_t current_gamma_count = 60;  // axis counts used by the current map
  std::size_t current_m_count = 60;
  RegimeThresholds thresholds;

  std::size_t workers = 0;  // 0: LZS_WORKERS or hardware concurrency
  double tolerance = 1e-10;
  std::string checkpoint;    // empty: <output.dir>/checkpoint.bin
  std::size_t stop_after = 0;

  std::string output_dir = "out";

  double iso_e0_min = 1.0;
  double iso_e0_max = 20.0;
  std::size_t iso_e0_count = 191;
  double iso_sign_floor = 1e-3;

  int resonance_max_order = 9;
  double resonance_gamma_min = 0.1;
  double resonance_gamma_max = 1000.0;
  std::size_t resonance_count = 200;

  double lz_window = 100.0;
  double lz_tolerance = 1e-12;

  /// Grid with pulse, material and numerics copied in; the current map uses
  /// its own axis counts.
  GridSpec resolved_grid(MapKind kind = MapKind::Population) const;
  /// Material and drive of the working point (point.* if set, else material/pulse).
  WorkingPoint resolved_point() const;
  void validate() const;
};

/// Parses `text` over the defaults. Unknown keys, malformed values and unit
/// mismatches raise ConfigError with line and column.
RunConfig parse_config(std::string_view text);

/// Applies one "key=value" override on top of `cfg`; short aliases gamma, M, k0
/// address point.gamma, point.m and point.k0.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Every key in canonical units with 17 significant digits; parse_config of
/// this text reproduces `cfg` exactly.
std::string canonical_text(const RunConfig& cfg);

/// The subset of canonical_text that enters the hash.
std::string hashed_text(const RunConfig& cfg);

/// FNV-1a 64 of the canonical text restricted to keys that affect results
/// (engine.workers, engine.checkpoint, engine.stop_after and output.* excluded).
std::uint64_t config_hash(const RunConfig& cfg);

/// Documented key list for `--help`-style output.
std::vector<std::string> config_keys();

}  // namespace lzs
