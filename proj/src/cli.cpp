#include "lzs/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lzs/analytics.hpp"
#include "lzs/config.hpp"
#include "lzs/errors.hpp"
#include "lzs/io.hpp"
#include "lzs/observables.hpp"
#include "lzs/propagator.hpp"
#include "lzs/pulse.hpp"
#include "lzs/sweep_engine.hpp"
#include "lzs/version.hpp"

namespace lzs {
namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::size_t workers = 0;
  bool workers_given = false;
  bool resume = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value)");
  cmd->add_option("--out", args.out_dir, "output directory (overrides output.dir)");
  cmd->add_option_function<std::size_t>(
      "--workers",
      [&args](const std::size_t& n) {
        args.workers = n;
        args.workers_given = true;
      },
      "worker threads (default: engine.workers, then LZS_WORKERS, then all cores)");
  cmd->add_flag("--resume", args.resume, "continue from the checkpoint of an interrupted run");
  cmd->add_option("--set", args.overrides, "override a configuration key, e.g. --set grid.m_count=40")
      ->allow_extra_args(false);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read config file " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : parse_config(read_file(args.config_path));
  for (const std::string& o : args.overrides) apply_override(cfg, o);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  cfg.validate();
  return cfg;
}

std::size_t resolve_workers(const CommonArgs& args, const RunConfig& cfg) {
  if (args.workers_given && args.workers > 0) return args.workers;
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("LZS_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    throw ValidationError("LZS_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += format_number(v);
  }
  return row + '\n';
}

void print_report(std::ostream& out, const WorkingPoint& wp, const AdiabaticityReport& r) {
  out << "gap_eV: " << format_number(wp.material.gap) << '\n'
      << "fermi_velocity_nm_per_fs: " << format_number(wp.material.fermi_velocity) << '\n'
      << "photon_energy_eV: " << format_number(wp.drive.photon_energy) << '\n'
      << "peak_field_V_per_nm: " << format_number(wp.drive.peak_field) << '\n'
      << "gamma: " << format_number(r.gamma) << '\n'
      << "M: " << format_number(r.m_photon) << '\n'
      << "z_R: " << format_number(r.z_r) << '\n'
      << "delta_LZ: " << format_number(r.delta_lz) << '\n'
      << "P_LZ: " << format_number(r.p_lz) << '\n'
      << "rabi_frequency_per_fs: " << format_number(r.rabi_freq) << '\n'
      << "transition_time_fs: " << format_number(r.transition_time) << '\n'
      << "sweep_rate_eV_per_fs: " << format_number(r.sweep_rate) << '\n'
      << "effective_mass_eV_fs2_per_nm2: " << format_number(r.eff_mass) << '\n'
      << "a0: " << format_number(r.a0) << '\n'
      << "regime: " << to_string(r.regime) << '\n'
      << "relativistic: " << (r.relativistic_flag ? "yes" : "no") << '\n';
}

int run_regimes(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load_config(args);
  const WorkingPoint wp = cfg.resolved_point();
  print_report(out, wp, compute_report(wp.material, wp.drive, cfg.thresholds));
  return kExitOk;
}

int run_trace(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load_config(args);
  const WorkingPoint wp = cfg.resolved_point();
  PulseSpec pulse = cfg.pulse;
  pulse.peak_field = wp.drive.peak_field;
  const SampledWaveform w = resolved_waveform(wp.material, pulse, std::abs(cfg.point_k0));
  const Trajectory traj = bloch_trajectory(w, cfg.point_k0, wp.material);
  PropagationOptions opts;
  opts.tol = cfg.tolerance;
  const PopulationTrace trace = std::isinf(cfg.t2)
                                    ? propagate_state(wp.material, traj, opts)
                                    : propagate_density(wp.material, traj, cfg.t2, opts);

  const std::filesystem::path dir = cfg.output_dir;
  std::string wave = "t_fs,A,E,k,bias_eV\n";
  for (std::size_t i = 0; i < w.size(); ++i)
    wave += csv_row({w.t[i], w.a[i], w.e[i], traj.k[i], traj.bias[i]});
  write_text_file(dir / "waveform.csv", wave);

  const double a_max = w.max_abs_a();
  std::string tr = "t_fs,A_norm,rho_cb,P_LZ_at_k,phase\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i)
    tr += csv_row({trace.t[i], a_max > 0.0 ? w.a[i] / a_max : 0.0, trace.rho_cb[i],
                   instantaneous_lz_probability(wp.material, traj.dkdt[i]), trace.phase[i]});
  write_text_file(dir / "trace.csv", tr);

  const AdiabaticityReport report = compute_report(wp.material, wp.drive, cfg.thresholds);
  std::vector<std::string> md{
      "samples: " + std::to_string(w.size()),
      "time_step_fs: " + format_number(w.step()),
      "residual_rho_cb: " + format_number(trace.final_rho_cb),
      "final_phase_rad: " + format_number(trace.final_phase),
      "max_norm_drift: " + format_number(trace.max_norm_drift),
      "regime: " + std::string(to_string(report.regime)),
  };
  write_text_file(dir / "manifest.txt", manifest_text(cfg, "trace", md));
  print_report(out, wp, report);
  out << "residual_rho_cb: " << format_number(trace.final_rho_cb) << '\n'
      << "final_phase_rad: " << format_number(trace.final_phase) << '\n'
      << "max_norm_drift: " << format_number(trace.max_norm_drift) << '\n'
      << "wrote: " << (dir / "waveform.csv").string() << ", " << (dir / "trace.csv").string() << '\n';
  return kExitOk;
}

int run_map_command(MapKind kind, const CommonArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(args);
  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  EngineOptions eo;
  eo.workers = resolve_workers(args, cfg);
  eo.checkpoint = cfg.checkpoint.empty() ? dir / "checkpoint.bin" : std::filesystem::path(cfg.checkpoint);
  eo.resume = args.resume;
  eo.config_hash = config_hash(cfg);
  eo.config_text = hashed_text(cfg);
  eo.max_new_cells = cfg.stop_after;
  if (args.resume && !std::filesystem::exists(eo.checkpoint))
    err << "note: no checkpoint at " << eo.checkpoint.string() << ", starting from scratch\n";
  std::size_t last_decile = 0;
  eo.progress = [&](std::size_t done, std::size_t total) {
    const std::size_t decile = total ? 10 * done / total : 10;
    if (decile > last_decile) {
      last_decile = decile;
      err << "progress: " << done << "/" << total << " cells\n";
    }
  };

  const GridSpec grid = cfg.resolved_grid(kind);
  const MapResult map =
      kind == MapKind::Population ? run_population_map(grid, eo) : run_current_map(grid, eo);

  std::vector<std::string> extra{"workers: " + std::to_string(eo.workers)};
  if (kind == MapKind::Current && map.pending() == 0) {
    std::vector<double> e0(cfg.iso_e0_count);
    for (std::size_t i = 0; i < e0.size(); ++i)
      e0[i] = cfg.iso_e0_min + (cfg.iso_e0_max - cfg.iso_e0_min) * static_cast<double>(i) /
                                   static_cast<double>(e0.size() - 1);
    std::vector<std::string> warnings;
    const auto iso = integrate_iso_field(map, e0, &warnings);
    std::string csv = "E0_Vnm,j_int,coverage\n";
    for (const auto& p : iso) csv += csv_row({p.e0, p.j_int, p.coverage});
    write_text_file(dir / "iso_field.csv", csv);
    std::string changes;
    for (double x : sign_changes(iso, cfg.iso_sign_floor))
      changes += (changes.empty() ? "" : " ") + format_number(x);
    extra.push_back("iso_sign_changes_Vnm: " + (changes.empty() ? std::string("none") : changes));
    std::size_t partial = 0;
    for (const auto& p : iso)
      if (p.coverage < 1.0 - 1e-12) ++partial;
    extra.push_back("iso_partial_coverage_lines: " + std::to_string(partial));
    out << "iso-field sign changes (V/nm): " << (changes.empty() ? "none" : changes) << '\n';
  }
  emit_map(map, cfg, dir, kind == MapKind::Population ? "sweep-map" : "current-map", extra);

  out << to_string(kind) << " map: " << map.completed() << " completed, " << map.failed()
      << " failed, " << map.pending() << " pending (" << map.resumed_cells
      << " from checkpoint) in " << format_number(map.wall_seconds) << " s\n"
      << "wrote: " << (dir / "map.csv").string() << '\n';
  for (const MapCell& c : map.cells)
    if (c.status == CellStatus::Failed)
      err << "warning: cell gamma=" << format_number(c.gamma) << " M=" << format_number(c.m)
          << " failed: " << c.reason << '\n';
  return map.failed() + map.pending() > 0 ? kExitPartial : kExitOk;
}

int run_resonance(const CommonArgs& args, int max_order, const std::vector<double>& gamma_range,
                  std::ostream& out) {
  RunConfig cfg = load_config(args);
  if (max_order > 0) cfg.resonance_max_order = max_order;
  if (!gamma_range.empty()) {
    if (gamma_range.size() != 2 || !(gamma_range[0] > 0.0) || !(gamma_range[1] > gamma_range[0]))
      throw ValidationError("--gamma-range takes two increasing positive values");
    cfg.resonance_gamma_min = gamma_range[0];
    cfg.resonance_gamma_max = gamma_range[1];
  }
  std::string csv = "n,gamma,M,parity\n";
  for (int n = 1; n <= cfg.resonance_max_order; ++n) {
    const ResonanceCurve curve =
        resonance_curve(n, cfg.resonance_gamma_min, cfg.resonance_gamma_max, cfg.resonance_count);
    for (const auto& [g, m] : curve.points)
      csv += std::to_string(n) + ',' + format_number(g) + ',' + format_number(m) + ',' +
             (curve.even ? "even" : "odd") + '\n';
  }
  const std::filesystem::path dir = cfg.output_dir;
  write_text_file(dir / "resonance.csv", csv);
  write_text_file(dir / "manifest.txt", manifest_text(cfg, "resonance", {}));
  out << "two-photon resonance at M=1: gamma=" << format_number(resonance_gamma(2, 1.0, 0.01, 100.0))
      << '\n'
      << "wrote: " << (dir / "resonance.csv").string() << '\n';
  return kExitOk;
}

int run_lz_check(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load_config(args);
  const double alpha0 = 1.0;  // eV/fs; only delta_LZ matters
  bool ok = true;
  out << "delta_LZ,P_formula,P_oracle,P_propagator,rel_err_oracle,rel_err_propagator,pass\n";
  for (double delta : {0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0}) {
    const MaterialSpec mat{lz_gap_for_delta(delta, alpha0), cfg.material.fermi_velocity};
    const double exact = lz_probability(delta);
    const LzSweepResult oracle = lz_oracle_sweep(mat, alpha0, cfg.lz_window, cfg.lz_tolerance);
    PropagationOptions opts;
    opts.tol = cfg.tolerance;
    opts.record = false;
    const double prop =
        propagate_state(mat, linear_sweep_trajectory(mat, alpha0, cfg.lz_window), opts).final_rho_cb;
    const double e1 = std::abs(oracle.transfer - exact) / exact;
    const double e2 = std::abs(prop - exact) / exact;
    const bool pass = e1 < 0.02 && e2 < 0.02;
    ok = ok && pass;
    out << format_number(delta) << ',' << format_number(exact) << ',' << format_number(oracle.transfer)
        << ',' << format_number(prop) << ',' << format_number(e1) << ',' << format_number(e2) << ','
        << (pass ? "yes" : "no") << '\n';
  }
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-level strong-field dynamics: adiabaticity regimes, LZS maps and residual currents",
               "lzs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  auto* trace = app.add_subcommand("trace", "time trace of one working point");
  auto* sweep = app.add_subcommand("sweep-map", "residual-population map over (gamma, M)");
  auto* current = app.add_subcommand("current-map", "residual-current map and iso-field integrals");
  auto* regimes = app.add_subcommand("regimes", "adiabaticity parameters and regime label");
  auto* resonance = app.add_subcommand("resonance", "n-photon resonance curves M(n, gamma)");
  auto* lz = app.add_subcommand("lz-check", "Landau-Zener oracle table; fails if any entry is off by 2%");
  int max_order = 0;
  std::vector<double> gamma_range;
  resonance->add_option("--orders", max_order, "highest photon order n (curves 1..n)");
  resonance->add_option("--gamma-range", gamma_range, "gamma_min gamma_max")->expected(2);
  for (CLI::App* cmd : {trace, sweep, current, regimes, resonance, lz}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error[usage]: " << e.what() << '\n' << app.help();
    return kExitValidation;
  }

  try {
    if (*trace) return run_trace(args, out);
    if (*sweep) return run_map_command(MapKind::Population, args, out, err);
    if (*current) return run_map_command(MapKind::Current, args, out, err);
    if (*regimes) return run_regimes(args, out);
    if (*resonance) return run_resonance(args, max_order, gamma_range, out);
    if (*lz) return run_lz_check(args, out);
  } catch (const CheckpointError& e) {
    err << "error[checkpoint]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error[validation]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PropagationError& e) {
    err << "error[propagation]: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const WindowError& e) {
    err << "error[window]: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error[runtime]: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace lzs
