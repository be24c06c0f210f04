#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lzs/constants.hpp"
#include "lzs/core_model.hpp"
#include "lzs/observables.hpp"
#include "lzs/propagator.hpp"
#include "lzs/pulse.hpp"

namespace lzs {

struct AxisSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  /// Log-spaced (gamma) or linear (M) samples including both ends.
  std::vector<double> values(bool log_spaced) const;
};

/// (gamma, M) map parameterization at fixed photon energy: per cell
/// Delta = M hbar omega and E0 = omega Delta / (2 v_F e gamma).
struct GridSpec {
  AxisSpec gamma{0.1, 10.0, 120};
  AxisSpec m{0.2, 3.2, 120};
  double fermi_velocity = 1.0;  // nm/fs
  PulseSpec pulse;              // photon energy, duration, cep, gdd, tod; peak_field is per cell
  double k0 = 0.0;              // population map start wave number
  double t2 = std::numeric_limits<double>::infinity();
  KWindowPolicy k_policy;       // current map
  PropagationOptions propagation{.tol = 1e-10, .record = false};
  RegimeThresholds thresholds;

  std::vector<double> gamma_values() const { return gamma.values(true); }
  std::vector<double> m_values() const { return m.values(false); }
  std::size_t cell_count() const { return gamma.count * m.count; }
  void validate() const;
};

enum class MapKind : std::uint32_t { Population = 1, Current = 2 };
enum class CellStatus : std::uint32_t { Pending = 0, Done = 1, Failed = 2 };

enum CellFlag : std::uint32_t {
  kFlagRelativistic = 1u << 0,
  kFlagUnconverged = 1u << 1,  // k0 refinement hit its cap
};

/// Longest failure reason kept per cell (fits the checkpoint record).
inline constexpr std::size_t kMaxReasonLength = 63;

struct MapCell {
  double gamma = 0.0;
  double m = 0.0;
  double e0 = 0.0;  // V/nm
  double rho_cb_res = std::numeric_limits<double>::quiet_NaN();
  double j_res = std::numeric_limits<double>::quiet_NaN();  // e/fs, current map only
  double k_half_width = 0.0;
  std::uint32_t k_points = 0;
  Regime regime = Regime::PerturbativeMultiphoton;
  std::uint32_t flags = 0;
  CellStatus status = CellStatus::Pending;
  std::string reason;
};

struct MapResult {
  MapKind kind = MapKind::Population;
  GridSpec grid;
  std::vector<MapCell> cells;  // index = i_gamma * m.count + i_m
  double wall_seconds = 0.0;
  std::size_t resumed_cells = 0;

  std::size_t index(std::size_t i_gamma, std::size_t i_m) const {
    return i_gamma * grid.m.count + i_m;
  }
  const MapCell& at(std::size_t i_gamma, std::size_t i_m) const {
    return cells[index(i_gamma, i_m)];
  }
  std::size_t completed() const;
  std::size_t failed() const;
  std::size_t pending() const;
};

struct EngineOptions {
  std::size_t workers = 1;             // 0 selects the hardware concurrency
  std::filesystem::path checkpoint;    // empty disables checkpointing
  bool resume = false;
  std::uint64_t config_hash = 0;
  std::string config_text;             // stored in the checkpoint for mismatch reports
  std::size_t max_new_cells = 0;       // stop after this many computed cells (0 = no limit)
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Residual conduction-band population from a single k0 per cell.
MapResult run_population_map(const GridSpec& grid, const EngineOptions& opts = {},
                             const Constants& c = kConstants);

/// k0-integrated residual current per cell; rho_cb_res holds the k0 = 0 value.
MapResult run_current_map(const GridSpec& grid, const EngineOptions& opts = {},
                          const Constants& c = kConstants);

/// Computes one cell of either map; exceptions from the physics are not caught.
MapCell evaluate_cell(MapKind kind, const GridSpec& grid, double gamma, double m_photon,
                      const Constants& c = kConstants);

struct IsoFieldPoint {
  double e0 = 0.0;        // V/nm
  double j_int = 0.0;     // integral of j_res dM along gamma(M) at fixed E0
  double coverage = 0.0;  // fraction of the M range inside the map
};

/// gamma(M) = omega M hbar omega / (2 v_F e E0) on the map's M nodes, j_res
/// interpolated linearly in log gamma, integrated by trapezoid over covered nodes.
std::vector<IsoFieldPoint> integrate_iso_field(const MapResult& map,
                                               std::span<const double> e0_values,
                                               std::vector<std::string>* warnings = nullptr,
                                               const Constants& c = kConstants);

/// E0 values where j_int changes sign, ignoring samples with
/// |j_int| <= floor_fraction * max|j_int|; zero crossings located linearly.
std::vector<double> sign_changes(std::span<const IsoFieldPoint> curve, double floor_fraction);

// Checkpoint file: see docs/checkpoint-format.md.
inline constexpr char kCheckpointMagic[8] = {'L', 'Z', 'S', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointRecordSize = 112;

struct CheckpointHeader {
  MapKind kind = MapKind::Population;
  std::uint64_t config_hash = 0;
  std::uint64_t cell_count = 0;
  std::string config_text;
};

struct CheckpointData {
  CheckpointHeader header;
  std::vector<std::pair<std::uint64_t, MapCell>> records;  // cell index, completed cell
};

CheckpointData read_checkpoint(const std::filesystem::path& path);

}  // namespace lzs
