#include "lzs/sweep_engine.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "lzs/errors.hpp"

namespace lzs {

std::vector<double> AxisSpec::values(bool log_spaced) const {
  if (count == 0) return {};
  if (count == 1) return {min};
  std::vector<double> v(count);
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / last;
    v[i] = log_spaced ? min * std::pow(max / min, f) : min + (max - min) * f;
  }
  v.front() = min;
  v.back() = max;
  return v;
}

void GridSpec::validate() const {
  if (gamma.count == 0 || m.count == 0) throw ValidationError("grid axes need at least one sample");
  if (!(gamma.min > 0.0) || !(gamma.max >= gamma.min))
    throw ValidationError("grid gamma range must satisfy 0 < gamma_min <= gamma_max");
  if (!(m.min > 0.0) || !(m.max >= m.min))
    throw ValidationError("grid M range must satisfy 0 < m_min <= m_max");
  if (gamma.count > 1 && gamma.max == gamma.min)
    throw ValidationError("grid gamma range is empty but gamma_count > 1");
  if (m.count > 1 && m.max == m.min)
    throw ValidationError("grid M range is empty but m_count > 1");
  if (!(fermi_velocity > 0.0)) throw ValidationError("fermi_velocity must be > 0");
  if (!std::isfinite(k0)) throw ValidationError("k0 must be finite");
  if (!(t2 > 0.0)) throw ValidationError("t2 must be > 0 (or infinite)");
  if (!(propagation.tol > 0.0)) throw ValidationError("propagation tolerance must be > 0");
  PulseSpec probe = pulse;
  probe.peak_field = 1.0;
  probe.validate();
  k_policy.validate();
}

std::size_t MapResult::completed() const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const MapCell& c) { return c.status == CellStatus::Done; }));
}

std::size_t MapResult::failed() const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const MapCell& c) { return c.status == CellStatus::Failed; }));
}

std::size_t MapResult::pending() const { return cells.size() - completed() - failed(); }

MapCell evaluate_cell(MapKind kind, const GridSpec& grid, double gamma, double m_photon,
                      const Constants& c) {
  const WorkingPoint wp = working_point(gamma, m_photon, grid.pulse.photon_energy,
                                        grid.fermi_velocity, c);
  MapCell cell;
  cell.gamma = gamma;
  cell.m = m_photon;
  cell.e0 = wp.drive.peak_field;
  const AdiabaticityReport report = compute_report(wp.material, wp.drive, grid.thresholds, c);
  cell.regime = report.regime;
  if (report.relativistic_flag) cell.flags |= kFlagRelativistic;

  PulseSpec pulse = grid.pulse;
  pulse.peak_field = wp.drive.peak_field;
  if (kind == MapKind::Population) {
    const SampledWaveform w = resolved_waveform(wp.material, pulse, std::abs(grid.k0), c);
    cell.rho_cb_res = residual_population(wp.material, w, grid.k0, grid.t2, grid.propagation, c);
  } else {
    KWindowPolicy policy = grid.k_policy;
    policy.t2 = grid.t2;
    const CurrentResult r =
        compute_residual_current(wp.material, pulse, policy, grid.propagation, c);
    cell.rho_cb_res = r.rho_center;
    cell.j_res = r.j_res;
    cell.k_half_width = r.half_width;
    cell.k_points = static_cast<std::uint32_t>(r.profile.k0.size());
    if (!r.converged) cell.flags |= kFlagUnconverged;
  }
  cell.status = CellStatus::Done;
  return cell;
}

namespace {

// ---- checkpoint serialization (little endian, fixed width) ----

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

double get_f64(const char* p) { return std::bit_cast<double>(get_u64(p)); }

constexpr std::size_t kFixedHeaderSize = 8 + 4 + 4 + 8 + 8 + 4 + 4;

std::string encode_header(const CheckpointHeader& h) {
  std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(h.kind));
  put_u64(out, h.config_hash);
  put_u64(out, h.cell_count);
  put_u32(out, static_cast<std::uint32_t>(kCheckpointRecordSize));
  put_u32(out, static_cast<std::uint32_t>(h.config_text.size()));
  out += h.config_text;
  return out;
}

std::string encode_record(std::uint64_t index, const MapCell& cell) {
  std::string out;
  out.reserve(kCheckpointRecordSize);
  put_u64(out, index);
  put_u32(out, static_cast<std::uint32_t>(cell.status));
  put_u32(out, static_cast<std::uint32_t>(cell.regime));
  put_f64(out, cell.rho_cb_res);
  put_f64(out, cell.j_res);
  put_f64(out, cell.k_half_width);
  put_u32(out, cell.k_points);
  put_u32(out, cell.flags);
  std::string reason = cell.reason.substr(0, kMaxReasonLength);
  reason.resize(kMaxReasonLength + 1, '\0');
  out += reason;
  return out;
}

MapCell decode_record(const char* p, std::uint64_t& index) {
  MapCell cell;
  index = get_u64(p);
  const std::uint32_t status = get_u32(p + 8);
  const std::uint32_t regime = get_u32(p + 12);
  if (status != static_cast<std::uint32_t>(CellStatus::Done) &&
      status != static_cast<std::uint32_t>(CellStatus::Failed))
    throw CheckpointError("checkpoint record has invalid status " + std::to_string(status));
  if (regime > static_cast<std::uint32_t>(Regime::AdiabaticImpulsiveLZS))
    throw CheckpointError("checkpoint record has invalid regime " + std::to_string(regime));
  cell.status = static_cast<CellStatus>(status);
  cell.regime = static_cast<Regime>(regime);
  cell.rho_cb_res = get_f64(p + 16);
  cell.j_res = get_f64(p + 24);
  cell.k_half_width = get_f64(p + 32);
  cell.k_points = get_u32(p + 40);
  cell.flags = get_u32(p + 44);
  const char* reason = p + 48;
  cell.reason.assign(reason, strnlen(reason, kMaxReasonLength + 1));
  return cell;
}

std::map<std::string, std::string> config_entries(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string describe_config_diff(const std::string& stored, const std::string& current) {
  const auto a = config_entries(stored);
  const auto b = config_entries(current);
  std::ostringstream msg;
  bool any = false;
  auto note = [&](const std::string& key, const std::string& from, const std::string& to) {
    msg << (any ? "; " : "") << key << ": " << from << " -> " << to;
    any = true;
  };
  for (const auto& [key, value] : a) {
    const auto it = b.find(key);
    if (it == b.end())
      note(key, value, "(absent)");
    else if (it->second != value)
      note(key, value, it->second);
  }
  for (const auto& [key, value] : b)
    if (!a.contains(key)) note(key, "(absent)", value);
  return any ? msg.str() : "no key-level differences in stored text";
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << "0x" << std::hex << v;
  return s.str();
}

// Relative cost: wave-number excursion e E0/(hbar omega) grows like M / gamma.
double cost_estimate(MapKind kind, const MapCell& cell) {
  const double excursion = cell.m / cell.gamma;
  return kind == MapKind::Current ? (1.0 + excursion) * (1.0 + excursion) : 1.0 + excursion;
}

MapResult run_map(MapKind kind, const GridSpec& grid, const EngineOptions& opts,
                  const Constants& c) {
  grid.validate();
  const auto clock_start = std::chrono::steady_clock::now();
  MapResult result;
  result.kind = kind;
  result.grid = grid;
  const std::vector<double> gammas = grid.gamma_values();
  const std::vector<double> ms = grid.m_values();
  result.cells.resize(grid.cell_count());
  for (std::size_t ig = 0; ig < gammas.size(); ++ig) {
    for (std::size_t im = 0; im < ms.size(); ++im) {
      MapCell& cell = result.cells[result.index(ig, im)];
      cell.gamma = gammas[ig];
      cell.m = ms[im];
      const WorkingPoint wp =
          working_point(cell.gamma, cell.m, grid.pulse.photon_energy, grid.fermi_velocity, c);
      cell.e0 = wp.drive.peak_field;
      const AdiabaticityReport report = compute_report(wp.material, wp.drive, grid.thresholds, c);
      cell.regime = report.regime;
      cell.flags = report.relativistic_flag ? kFlagRelativistic : 0u;
    }
  }

  std::ofstream checkpoint;
  if (!opts.checkpoint.empty()) {
    const bool existing = opts.resume && std::filesystem::exists(opts.checkpoint);
    if (existing) {
      const CheckpointData data = read_checkpoint(opts.checkpoint);
      if (data.header.kind != kind)
        throw CheckpointError("checkpoint " + opts.checkpoint.string() +
                              " belongs to a different map kind");
      if (data.header.config_hash != opts.config_hash)
        throw CheckpointError("checkpoint config hash " + hex(data.header.config_hash) +
                              " does not match current " + hex(opts.config_hash) + " (" +
                              describe_config_diff(data.header.config_text, opts.config_text) +
                              ")");
      if (data.header.cell_count != result.cells.size())
        throw CheckpointError("checkpoint cell count does not match the grid");
      for (const auto& [index, stored] : data.records) {
        if (index >= result.cells.size()) throw CheckpointError("checkpoint cell index out of range");
        MapCell& cell = result.cells[index];
        const double g = cell.gamma, m = cell.m, e0 = cell.e0;
        cell = stored;
        cell.gamma = g;
        cell.m = m;
        cell.e0 = e0;
      }
      result.resumed_cells = data.records.size();
      // Drop a torn trailing record before appending.
      const std::uintmax_t valid = kFixedHeaderSize + data.header.config_text.size() +
                                   data.records.size() * kCheckpointRecordSize;
      if (std::filesystem::file_size(opts.checkpoint) != valid)
        std::filesystem::resize_file(opts.checkpoint, valid);
      checkpoint.open(opts.checkpoint, std::ios::binary | std::ios::app);
    } else {
      checkpoint.open(opts.checkpoint, std::ios::binary | std::ios::trunc);
      const std::string header = encode_header(
          {kind, opts.config_hash, static_cast<std::uint64_t>(result.cells.size()),
           opts.config_text});
      checkpoint.write(header.data(), static_cast<std::streamsize>(header.size()));
    }
    if (!checkpoint) throw std::runtime_error("cannot write checkpoint " + opts.checkpoint.string());
    checkpoint.flush();
  }

  std::vector<std::size_t> tasks;
  for (std::size_t i = 0; i < result.cells.size(); ++i)
    if (result.cells[i].status == CellStatus::Pending) tasks.push_back(i);
  std::stable_sort(tasks.begin(), tasks.end(), [&](std::size_t a, std::size_t b) {
    return cost_estimate(kind, result.cells[a]) > cost_estimate(kind, result.cells[b]);
  });
  if (opts.max_new_cells > 0 && tasks.size() > opts.max_new_cells) tasks.resize(opts.max_new_cells);

  std::size_t workers = opts.workers == 0 ? std::thread::hardware_concurrency() : opts.workers;
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, tasks.size()));

  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::pair<std::size_t, MapCell>> finished;
  std::size_t workers_done = 0;

  auto work = [&]() {
    for (;;) {
      if (opts.cancel && opts.cancel->load()) break;
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) break;
      const std::size_t index = tasks[t];
      const MapCell& proto = result.cells[index];
      MapCell cell;
      try {
        cell = evaluate_cell(kind, grid, proto.gamma, proto.m, c);
      } catch (const std::exception& e) {
        cell = proto;
        cell.status = CellStatus::Failed;
        cell.reason = std::string(e.what()).substr(0, kMaxReasonLength);
      }
      std::lock_guard lock(mutex);
      finished.emplace_back(index, std::move(cell));
      ready.notify_one();
    }
    std::lock_guard lock(mutex);
    ++workers_done;
    ready.notify_one();
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);

  // This thread is the only writer of result.cells and of the checkpoint.
  std::size_t done = 0;
  for (;;) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return !finished.empty() || workers_done == workers; });
    if (finished.empty()) break;
    auto [index, cell] = std::move(finished.front());
    finished.pop_front();
    lock.unlock();
    if (checkpoint.is_open()) {
      const std::string rec = encode_record(index, cell);
      checkpoint.write(rec.data(), static_cast<std::streamsize>(rec.size()));
      checkpoint.flush();
    }
    result.cells[index] = std::move(cell);
    ++done;
    if (opts.progress) opts.progress(done, tasks.size());
  }
  pool.clear();
  if (checkpoint.is_open() && !checkpoint)
    throw std::runtime_error("failed writing checkpoint " + opts.checkpoint.string());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return result;
}

}  // namespace

CheckpointData read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kFixedHeaderSize ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0)
    throw CheckpointError(path.string() + " is not a checkpoint file");
  const char* p = bytes.data();
  const std::uint32_t version = get_u32(p + 8);
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  CheckpointData data;
  const std::uint32_t kind = get_u32(p + 12);
  if (kind != static_cast<std::uint32_t>(MapKind::Population) &&
      kind != static_cast<std::uint32_t>(MapKind::Current))
    throw CheckpointError("checkpoint has unknown map kind");
  data.header.kind = static_cast<MapKind>(kind);
  data.header.config_hash = get_u64(p + 16);
  data.header.cell_count = get_u64(p + 24);
  if (get_u32(p + 32) != kCheckpointRecordSize)
    throw CheckpointError("checkpoint record size mismatch");
  const std::uint32_t text_length = get_u32(p + 36);
  if (bytes.size() < kFixedHeaderSize + text_length)
    throw CheckpointError("checkpoint header truncated");
  data.header.config_text.assign(p + kFixedHeaderSize, text_length);
  std::size_t offset = kFixedHeaderSize + text_length;
  while (offset + kCheckpointRecordSize <= bytes.size()) {
    std::uint64_t index = 0;
    MapCell cell = decode_record(p + offset, index);
    data.records.emplace_back(index, std::move(cell));
    offset += kCheckpointRecordSize;
  }
  return data;
}

MapResult run_population_map(const GridSpec& grid, const EngineOptions& opts,
                             const Constants& c) {
  return run_map(MapKind::Population, grid, opts, c);
}

MapResult run_current_map(const GridSpec& grid, const EngineOptions& opts, const Constants& c) {
  return run_map(MapKind::Current, grid, opts, c);
}

std::vector<IsoFieldPoint> integrate_iso_field(const MapResult& map,
                                               std::span<const double> e0_values,
                                               std::vector<std::string>* warnings,
                                               const Constants& c) {
  const GridSpec& grid = map.grid;
  const std::vector<double> gammas = grid.gamma_values();
  const std::vector<double> ms = grid.m_values();
  if (gammas.size() < 2 || ms.size() < 2)
    throw ValidationError("iso-field integration needs at least 2x2 map cells");
  const double omega = grid.pulse.omega(c);
  const double photon = grid.pulse.photon_energy;
  const double log_min = std::log(gammas.front());
  const double log_step = (std::log(gammas.back()) - log_min) / static_cast<double>(gammas.size() - 1);
  const double m_span = ms.back() - ms.front();

  std::vector<IsoFieldPoint> out;
  out.reserve(e0_values.size());
  for (double e0 : e0_values) {
    if (!(e0 > 0.0)) throw ValidationError("iso-field E0 must be > 0");
    // j_res at each M node along the line, NaN where the line leaves the map.
    std::vector<double> j(ms.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t im = 0; im < ms.size(); ++im) {
      const double gamma = omega * ms[im] * photon / (2.0 * grid.fermi_velocity * c.e * e0);
      const double x = (std::log(gamma) - log_min) / log_step;
      const double last = static_cast<double>(gammas.size() - 1);
      if (x < -1e-9 || x > last + 1e-9) continue;
      const double xc = std::clamp(x, 0.0, last);
      const auto i0 = std::min(static_cast<std::size_t>(xc), gammas.size() - 2);
      const double f = xc - static_cast<double>(i0);
      const double j0 = map.at(i0, im).j_res;
      const double j1 = map.at(i0 + 1, im).j_res;
      j[im] = (1.0 - f) * j0 + f * j1;
    }
    IsoFieldPoint p;
    p.e0 = e0;
    double covered = 0.0;
    for (std::size_t im = 1; im < ms.size(); ++im) {
      if (std::isnan(j[im - 1]) || std::isnan(j[im])) continue;
      const double dm = ms[im] - ms[im - 1];
      p.j_int += 0.5 * (j[im - 1] + j[im]) * dm;
      covered += dm;
    }
    p.coverage = m_span > 0.0 ? covered / m_span : 0.0;
    if (warnings && p.coverage < 1.0 - 1e-12) {
      std::ostringstream msg;
      msg << "iso-field line E0=" << e0 << " V/nm covers " << p.coverage
          << " of the M range inside the map";
      warnings->push_back(msg.str());
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> sign_changes(std::span<const IsoFieldPoint> curve, double floor_fraction) {
  double peak = 0.0;
  for (const auto& p : curve) peak = std::max(peak, std::abs(p.j_int));
  const double floor = floor_fraction * peak;
  std::vector<double> out;
  std::ptrdiff_t last = -1;  // last significant sample
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(std::abs(curve[i].j_int) > floor)) continue;
    if (last >= 0 && (curve[i].j_int > 0.0) != (curve[static_cast<std::size_t>(last)].j_int > 0.0)) {
      // Locate the raw zero crossing between the two significant samples.
      for (auto k = static_cast<std::size_t>(last); k < i; ++k) {
        const double a = curve[k].j_int, b = curve[k + 1].j_int;
        if ((a > 0.0) != (b > 0.0) || b == 0.0) {
          const double t = a == b ? 0.0 : a / (a - b);
          out.push_back(curve[k].e0 + t * (curve[k + 1].e0 - curve[k].e0));
          break;
        }
      }
    }
    last = static_cast<std::ptrdiff_t>(i);
  }
  return out;
}

}  // namespace lzs
