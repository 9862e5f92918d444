#include "crib/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "crib/core/errors.hpp"
#include "crib/core/state.hpp"

namespace crib {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

void write_json(const fs::path& path, const nlohmann::json& doc) { open_out(path) << doc.dump(2) << '\n'; }

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw ConfigError("--format must be csv or json");
}

nlohmann::json optimum_json(const ScalarOptimum& o) {
  return {{"argmax", o.argmax},
          {"value", o.value},
          {"evaluations", o.evaluations},
          {"fallback_scan", o.fallback_scan},
          {"scan_argmax", o.scan_argmax},
          {"scan_value", o.scan_value}};
}

nlohmann::json diagnostics_json(const std::vector<Diagnostic>& diagnostics) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : diagnostics) {
    out.push_back({{"severity", d.severity == Diagnostic::Severity::Warning ? "warning" : "info"},
                   {"code", d.code},
                   {"message", d.message}});
  }
  return out;
}

nlohmann::json trajectory_json(const TrajectoryRecord& tr) {
  return {{"t", tr.times},
          {"spin_pop", tr.spin_population},
          {"cavity_pop", tr.cavity_population},
          {"qubit_pop", tr.qubit_population},
          {"sym_overlap", tr.symmetric_overlap}};
}

struct StorageOutcome {
  StorageProblem problem;
  double eta_s = 0.0;
  std::string source;
  nlohmann::json report;
};

StorageOutcome evaluate_storage(const StorageSection& sec) {
  StorageOutcome r;
  r.problem = sec.problem;
  nlohmann::json report;
  if (sec.width_min) {
    if (r.problem.envelope.kind() == EnvelopeKind::Table) {
      throw ConfigError("storage.optimize_width: a table envelope has no adjustable width");
    }
    const auto opt = optimize_envelope_width(r.problem, *sec.width_min, *sec.width_max);
    r.problem.envelope = r.problem.envelope.with_bandwidth(opt.argmax);
    report["optimization"] = optimum_json(opt);
    r.source = "storage_efficiency, width-optimized " + std::string(to_string(r.problem.envelope.kind()));
  } else {
    r.source = "storage_efficiency, " + std::string(to_string(r.problem.envelope.kind()));
  }
  r.eta_s = storage_efficiency(r.problem);
  const auto& env = r.problem.envelope;
  report["envelope"] = {{"kind", std::string(to_string(env.kind()))},
                        {"bandwidth_ratio", env.bandwidth()},
                        {"carrier", env.carrier()},
                        {"center", env.center()},
                        {"pulse_duration", env.pulse_duration()},
                        {"spectral_norm", env.spectral_norm()}};
  report["optical_depth"] = r.problem.optical_depth;
  report["spectral_offset"] = r.problem.spectral_offset;
  report["prefactor"] = storage_prefactor(r.problem.optical_depth);
  report["eta_s"] = r.eta_s;
  r.report = std::move(report);
  return r;
}

nlohmann::json report_header(const char* schema, const RunConfig& config) {
  return {{"schema", schema},
          {"version", 1},
          {"artifact_version", CRIB_VERSION},
          {"units", "G"},
          {"resolved_config", resolved_yaml(config)}};
}

}  // namespace

RunConfig fig3_preset() {
  RunConfig c;
  c.source = "<preset fig3>";
  c.protocol = "staggered";
  auto& s = c.transfer;
  s.n_spins = 128;
  s.intrinsic_half_width = 2.0;
  s.induced_half_width = 10.0;
  s.collective_coupling = 6.0;
  s.intrinsic_profile = DetuningProfile::UniformGrid;
  s.seed = 0;
  s.spin_center_detuning = 176.0;
  s.initial_cavity_detuning = 20.0;
  s.qubit_coupling = 1.0;
  s.rephasing_time = 0.15;
  s.trim_spin = 1.0;
  s.trim_cavity = 1.0;
  s.park_duration = 1.0;
  s.gap = 0.0;
  s.ramp_duration = 0.0;
  s.integration.tolerance = 1e-10;
  s.integration.n_samples = 401;
  return c;
}

RunConfig fig2_preset() {
  RunConfig c = fig3_preset();
  c.source = "<preset fig2>";
  c.transfer.induced_half_width = 7.0;
  c.transfer.collective_coupling = 6.0;
  c.axis1 = {"delta_IB", 0.0, 5.0, 40};
  c.axis2 = {"tau_R", 0.0, 0.5, 40};
  return c;
}

nlohmann::json cmd_storage(const RunConfig& config, const OutputOptions& output) {
  if (!config.storage.present) throw ConfigError(config.source + ": storage.optical_depth: missing required field");
  check_format(output.format);
  ensure_dir(output.out_dir);
  auto outcome = evaluate_storage(config.storage);
  nlohmann::json report = report_header("crib-storage-report", config);
  report.update(outcome.report);
  report["eta_s_source"] = outcome.source;

  if (config.storage.crosscheck) {
    const auto& sec = config.storage;
    const auto numeric = solve_propagation(outcome.problem, sec.n_z, sec.n_t, sec.t_final);
    const auto analytic = analytic_coherence(outcome.problem, numeric.time, sec.n_z);
    report["crosscheck"] = {{"relative_l2", relative_l2_distance(numeric, analytic)},
                            {"n_z", sec.n_z},
                            {"n_t", sec.n_t},
                            {"t_final", numeric.time},
                            {"analytic_early_time", analytic.early_time}};
    auto num_out = open_out(output.out_dir / "coherence_numeric.csv");
    write_coherence_csv(num_out, numeric);
    auto an_out = open_out(output.out_dir / "coherence_analytic.csv");
    write_coherence_csv(an_out, analytic);
  }
  write_json(output.out_dir / "storage_report.json", report);
  write_text(output.out_dir / "resolved_config.yaml", resolved_yaml(config));
  return report;
}

nlohmann::json cmd_transfer(const RunConfig& config, const OutputOptions& output) {
  check_format(output.format);
  ensure_dir(output.out_dir);
  const auto& s = config.transfer;
  ProtocolResult result;
  const std::string& p = config.protocol;
  if (p == "staggered") result = run_staggered(s);
  else if (p == "adiabatic") result = run_adiabatic(s, config.adiabatic);
  else if (p == "reduced-sweep") result = run_reduced_sweep_variant(s, config.spin_park_detuning);
  else if (p == "reverse") result = run_reverse(s);
  else if (p == "three-mode") result = reduced_three_mode(s);
  else throw ConfigError("unknown protocol '" + p + "'");

  auto diagnostics = diagnose(s, result.params.schedule, config.travel_budget);
  for (const auto& d : result.diagnostics) {
    if (d.code != "travel-budget") diagnostics.push_back(d);
  }
  // diagnose() already covers proximity; keep one copy of each code.
  std::vector<Diagnostic> unique;
  for (const auto& d : diagnostics) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || (u.code == d.code && u.message == d.message);
    if (!dup) unique.push_back(d);
  }

  nlohmann::json report = report_header("crib-transfer-report", config);
  report["protocol"] = p;
  report["efficiency"] = result.efficiency;
  report["efficiency_meaning"] = p == "reverse" ? "overlap of the final spin state with the rephasing spin wave"
                                                : "final qubit population";
  report["final_populations"] = {{"spin", result.trajectory.spin_population.back()},
                                 {"cavity", result.trajectory.cavity_population.back()},
                                 {"qubit", result.trajectory.qubit_population.back()},
                                 {"sym_overlap", result.trajectory.symmetric_overlap.back()}};
  const auto est = eta_t_estimate(s.intrinsic_half_width, spin_pulse_time(s.collective_coupling > 0 ? s.collective_coupling : 1.0));
  report["eta_t_estimate"] = {{"sinc2", est.sinc2}, {"gaussian", est.gaussian}};
  report["cavity_travel"] = result.cavity_travel;
  report["diagnostics"] = diagnostics_json(unique);
  report["integrator"] = {{"accepted_steps", result.trajectory.stats.accepted},
                          {"rejected_steps", result.trajectory.stats.rejected},
                          {"evaluations", result.trajectory.stats.evaluations},
                          {"max_norm_drift", result.trajectory.max_norm_drift}};
  report["settings"] = settings_to_json(s);
  report["schedule"] = to_json(result.params.schedule);
  if (config.storage.present) {
    auto storage = evaluate_storage(config.storage);
    const auto eta = EfficiencyReport::combine(storage.eta_s, storage.source, result.efficiency,
                                               "simulated " + p + " transfer");
    report["storage"] = storage.report;
    report["eta"] = {{"eta_s", eta.eta_s},
                     {"eta_t", eta.eta_t},
                     {"eta_total", eta.eta_total},
                     {"eta_s_source", eta.eta_s_source},
                     {"eta_t_source", eta.eta_t_source}};
  }

  if (output.format == "csv") {
    auto out = open_out(output.out_dir / "trajectory.csv");
    write_trajectory_csv(out, result.trajectory);
  } else {
    write_json(output.out_dir / "trajectory.json", trajectory_json(result.trajectory));
  }
  write_json(output.out_dir / "schedule.json", to_json(result.params.schedule));
  write_json(output.out_dir / "transfer_report.json", report);
  write_text(output.out_dir / "resolved_config.yaml", resolved_yaml(config));
  return report;
}

nlohmann::json cmd_sweep(const RunConfig& config, bool resume, const OutputOptions& output) {
  check_format(output.format);
  const SweepSpec spec = config.sweep_spec();
  validate(spec);
  ensure_dir(output.out_dir);
  const fs::path csv_path = output.out_dir / "sweep.csv";

  std::vector<std::optional<double>> completed;
  if (resume) {
    if (output.format != "csv") throw ConfigError("--resume works on the CSV output only");
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw ConfigError("--resume: no existing '" + csv_path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    // A run killed mid-write may leave a partial last line; drop it.
    if (!text.empty() && text.back() != '\n') text.erase(text.find_last_of('\n') + 1);
    std::istringstream partial(text);
    completed = read_completed_points(partial, spec);
  }

  SweepResult result;
  if (output.format == "csv") {
    auto out = open_out(csv_path);
    write_sweep_header(out, spec);
    out.flush();
    result = run_sweep(spec, completed, [&](std::size_t, const SweepPoint& p) {
      write_sweep_row(out, p);
      out.flush();
    });
  } else {
    result = run_sweep(spec, completed);
    nlohmann::json grid = {{"axis1", spec.axis1.name}, {"axis2", spec.axis2.name}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : result.points) {
      rows.push_back({p.value1, p.value2, std::isnan(p.efficiency) ? nlohmann::json(nullptr) : nlohmann::json(p.efficiency)});
    }
    grid["rows"] = rows;
    write_json(output.out_dir / "sweep.json", grid);
  }

  nlohmann::json sidecar = sweep_sidecar(result);
  sidecar["resolved_config"] = resolved_yaml(config);
  sidecar["note"] = "default axis ranges (delta_IB in [0, 5] G, tau_R in [0, 0.5]/G, 40 x 40) are choices of this tool";
  write_json(output.out_dir / "sweep.meta.json", sidecar);
  write_text(output.out_dir / "resolved_config.yaml", resolved_yaml(config));
  return sidecar;
}

EstimateResult cmd_estimate(double intrinsic_half_width, double spin_pulse_time) {
  EstimateResult r;
  r.argument = intrinsic_half_width * spin_pulse_time;
  r.estimate = eta_t_estimate(intrinsic_half_width, spin_pulse_time);
  return r;
}

void print_estimate(std::ostream& out, const EstimateResult& r, const std::string& format) {
  if (format == "json") {
    out << nlohmann::json{{"delta_IB_T_S", r.argument}, {"sinc2", r.estimate.sinc2}, {"gaussian", r.estimate.gaussian}}.dump(2)
        << '\n';
    return;
  }
  char line[128];
  std::snprintf(line, sizeof line, "delta_IB*T_S = %.10g\n", r.argument);
  out << line;
  std::snprintf(line, sizeof line, "sinc2        = %.5f\n", r.estimate.sinc2);
  out << line;
  std::snprintf(line, sizeof line, "gaussian     = %.5f\n", r.estimate.gaussian);
  out << line;
  if (std::abs(r.estimate.sinc2 - r.estimate.gaussian) > 0.01) {
    out << "note: the gaussian form exp(-x^2/3) is a small-argument approximation and no longer tracks sinc2 here\n";
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon storage and spin-ensemble-to-qubit transfer simulator", "crib-sim"};
  app.set_version_flag("--version", CRIB_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  OutputOptions output;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for random detuning profiles");
  app.add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Directory for output files");
  app.add_option("--format", output.format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));

  auto* storage = app.add_subcommand("storage", "Storage efficiency of the input envelope");
  bool optimize_width = false, crosscheck = false;
  std::optional<double> optical_depth;
  storage->add_flag("--optimize-width", optimize_width, "Maximize over the envelope bandwidth");
  storage->add_flag("--crosscheck", crosscheck, "Compare the propagation solver with the closed form");
  storage->add_option("--optical-depth", optical_depth, "Optical depth d");
  storage->fallthrough();

  auto* transfer = app.add_subcommand("transfer", "Simulate a transfer protocol");
  std::optional<std::string> protocol;
  std::optional<double> sweep_duration, spin_park, tau_r, delta_ib, delta_inh, kappa;
  std::optional<std::size_t> n_spins;
  transfer->add_option("--protocol", protocol, "staggered | adiabatic | reduced-sweep | reverse | three-mode");
  transfer->add_option("--sweep-duration", sweep_duration, "Adiabatic sweep duration [1/G]");
  transfer->add_option("--spin-park-detuning", spin_park, "Spin shift during the qubit stage (reduced-sweep) [G]");
  transfer->add_option("--tau-R", tau_r, "Rephasing time [1/G]");
  transfer->add_option("--delta-IB", delta_ib, "Intrinsic half-width [G]");
  transfer->add_option("--delta-inh", delta_inh, "Induced half-width [G]");
  transfer->add_option("--kappa-sqrtN", kappa, "Collective coupling [G]");
  transfer->add_option("--n-spins", n_spins, "Number of spins");
  transfer->fallthrough();

  auto* sweep = app.add_subcommand("sweep", "Two-axis efficiency sweep of the staggered protocol");
  bool resume = false;
  sweep->add_flag("--resume", resume, "Reuse completed rows of an existing sweep.csv");
  sweep->fallthrough();

  auto* estimate = app.add_subcommand("estimate", "Closed-form dephasing loss of the spin pulse");
  double est_delta_ib = 0.0;
  std::optional<double> est_kappa, est_time;
  estimate->add_option("--delta-IB", est_delta_ib, "Intrinsic half-width [G]")->required();
  estimate->add_option("--kappa-sqrtN", est_kappa, "Collective coupling [G]; sets T_S = pi/(2 kappa sqrt(N))");
  estimate->add_option("--spin-time", est_time, "Spin pulse duration T_S [1/G]");
  estimate->fallthrough();

  auto* reproduce = app.add_subcommand("reproduce", "Run a figure preset");
  std::string figure;
  reproduce->add_option("figure", figure, "fig2 | fig3")->required()->check(CLI::IsMember({"fig2", "fig3"}));
  reproduce->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  }
  output.out_dir = out_dir;

  try {
    if (*estimate) {
      double t_s;
      if (est_time) {
        t_s = *est_time;
      } else {
        t_s = spin_pulse_time(est_kappa.value_or(6.0));
        if (est_kappa && !(*est_kappa > 0.0)) throw ConfigError("--kappa-sqrtN must be > 0");
      }
      print_estimate(out, cmd_estimate(est_delta_ib, t_s), output.format);
      return kExitOk;
    }

    RunConfig config;
    if (*reproduce) {
      if (!config_path.empty()) err << "reproduce: presets ignore --config\n";
      config = figure == "fig2" ? fig2_preset() : fig3_preset();
    } else if (!config_path.empty()) {
      config = load_config(config_path);
    }
    if (seed) config.transfer.seed = *seed;
    if (workers) config.workers = *workers;

    if (*storage) {
      if (optical_depth) {
        config.storage.present = true;
        config.storage.problem.optical_depth = *optical_depth;
      }
      if (optimize_width && !config.storage.width_min) {
        config.storage.width_min = 0.05;
        config.storage.width_max = 4.0;
      }
      if (crosscheck) config.storage.crosscheck = true;
      const auto report = cmd_storage(config, output);
      out << "eta_s = " << report["eta_s"].get<double>() << '\n';
      return kExitOk;
    }
    if (*transfer || (*reproduce && figure == "fig3")) {
      if (protocol) config.protocol = *protocol;
      if (sweep_duration) config.adiabatic.sweep_duration = *sweep_duration;
      if (spin_park) config.spin_park_detuning = *spin_park;
      if (tau_r) config.transfer.rephasing_time = *tau_r;
      if (delta_ib) config.transfer.intrinsic_half_width = *delta_ib;
      if (delta_inh) config.transfer.induced_half_width = *delta_inh;
      if (kappa) config.transfer.collective_coupling = *kappa;
      if (n_spins) config.transfer.n_spins = *n_spins;
      const auto report = cmd_transfer(config, output);
      out << config.protocol << " efficiency = " << report["efficiency"].get<double>() << '\n';
      if (report.contains("eta")) out << "eta = eta_s * eta_t = " << report["eta"]["eta_total"].get<double>() << '\n';
      for (const auto& d : report["diagnostics"]) err << "warning: " << d["message"].get<std::string>() << '\n';
      return kExitOk;
    }
    if (*sweep || (*reproduce && figure == "fig2")) {
      const auto sidecar = cmd_sweep(config, resume, output);
      out << "sweep: " << sidecar["points"].get<std::size_t>() << " points, " << sidecar["computed"].get<std::size_t>()
          << " computed, " << sidecar["resumed"].get<std::size_t>() << " resumed, "
          << sidecar["failures"].size() << " failed\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace crib
