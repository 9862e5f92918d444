// Acceptance criteria, one PASS/FAIL line each. Run one with --criterion <name>
// or all of them without arguments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crib/cli/commands.hpp"
#include "crib/core/special_functions.hpp"
#include "crib/core/state.hpp"
#include "crib/storage/storage.hpp"
#include "crib/sweep/sweep.hpp"
#include "crib/transfer/dynamics.hpp"
#include "crib/transfer/protocols.hpp"

using namespace crib;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TransferSettings fig3_settings() { return fig3_preset().transfer; }

Outcome fig3() {
  const auto start = std::chrono::steady_clock::now();
  const double eta = run_staggered(fig3_settings()).efficiency;
  const double elapsed = seconds_since(start);
  const bool pass = std::abs(eta - 0.92) <= 0.03 && elapsed < 10.0;
  return {pass, fmt("efficiency %.6f (target 0.92 +- 0.03), runtime %.3f s (limit 10 s)", eta, elapsed)};
}

Outcome fig2() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "crib_acceptance_fig2";
  fs::remove_all(dir);
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const std::string dir_arg = dir.string();
  const char* argv[] = {"crib-sim", "--workers", "4", "--out-dir", dir_arg.c_str(), "reproduce", "fig2"};
  const int code = run_cli(7, argv, out, err);
  const double elapsed = seconds_since(start);
  if (code != 0) return {false, "reproduce fig2 failed: " + err.str()};

  const SweepSpec spec = fig2_preset().sweep_spec();
  std::ifstream in(dir / "sweep.csv");
  const auto points = read_completed_points(in, spec);
  const std::size_t n1 = spec.axis1.n_points, n2 = spec.axis2.n_points;
  std::size_t rows = 0;
  std::vector<double> row_max(n1, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const auto& p = points[i * n2 + j];
      if (!p) continue;
      ++rows;
      row_max[i] = std::max(row_max[i], *p);
    }
  }
  bool monotone = true;
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < n1; ++i) {
    const double rise = row_max[i] - row_max[i - 1];
    worst_rise = std::max(worst_rise, rise);
    if (rise > 0.01) monotone = false;
  }
  const bool a = row_max[0] >= 0.97;
  const bool pass = rows == n1 * n2 && a && monotone && elapsed < 300.0;
  return {pass, fmt("%zu rows; (a) max over tau_R at delta_IB=0: %.6f (>= 0.97); (b) largest rise of the row "
                    "maximum: %.2e (<= 0.01); runtime %.1f s with 4 workers (limit 300 s)",
                    rows, row_max[0], worst_rise, elapsed)};
}

Outcome dephasing_estimate() {
  const std::size_t n = 2000;
  const double ts = spin_pulse_time(6.0);
  double worst = 0.0;
  std::string values;
  for (double x : {pi / 12, pi / 6, pi / 3, pi / 2}) {
    TransferSettings s;
    s.n_spins = n;
    s.intrinsic_half_width = x / ts;
    s.induced_half_width = 0.0;
    TransferParams p = make_params(s, ProtocolSchedule{});
    p.ensemble.collective_coupling = 0.0;
    p.qubit_coupling = 0.0;
    p.schedule.segments = {Segment::hold(ts, 0.0, -1, 0.0, "free")};
    const auto r = evolve(p, SingleExcitationState::dicke(n), ts);
    const double overlap = symmetric_overlap(r.final_state);
    const double sinc2 = std::pow(std::sin(x) / x, 2);
    worst = std::max(worst, std::abs(overlap - sinc2));
    values += fmt(" %.6f/%.6f", overlap, sinc2);
  }
  const double spot = eta_t_estimate(2.0, ts).sinc2;
  const bool spot_ok = std::abs(spot - 9.0 / (pi * pi)) <= 1e-14;
  return {worst <= 1e-3 && spot_ok,
          fmt("max |overlap - sinc^2| = %.2e (<= 1e-3) at N = 2000, overlap/sinc^2:", worst) + values +
              fmt("; sinc^2(pi/6) = %.12f vs 9/pi^2 = %.12f", spot, 9.0 / (pi * pi))};
}

Outcome reduced_model() {
  double worst = 0.0;
  for (std::size_t n : {16u, 128u, 1000u}) {
    TransferSettings s = fig3_settings();
    s.n_spins = n;
    s.intrinsic_half_width = 0.0;
    s.induced_half_width = 0.0;
    const auto full = run_staggered(s).trajectory;
    const auto reduced = reduced_three_mode(s).trajectory;
    if (full.times != reduced.times) return {false, "sample times differ"};
    for (std::size_t i = 0; i < full.times.size(); ++i) {
      worst = std::max({worst, std::abs(full.qubit_amplitude[i] - reduced.qubit_amplitude[i]),
                        std::abs(full.cavity_amplitude[i] - reduced.cavity_amplitude[i]),
                        std::abs(full.symmetric_amplitude[i] - reduced.symmetric_amplitude[i])});
    }
  }
  return {worst <= 1e-8, fmt("max amplitude difference %.2e over N = 16, 128, 1000 (<= 1e-8)", worst)};
}

Outcome norm_gauge() {
  using Runner = std::function<ProtocolResult(const TransferSettings&)>;
  const std::vector<std::pair<std::string, Runner>> families = {
      {"staggered", [](const TransferSettings& s) { return run_staggered(s); }},
      {"adiabatic-20", [](const TransferSettings& s) { return run_adiabatic(s, {}); }},
      {"adiabatic-100",
       [](const TransferSettings& s) {
         AdiabaticOptions o;
         o.sweep_duration = 100.0;
         return run_adiabatic(s, o);
       }},
      {"reduced-sweep", [](const TransferSettings& s) { return run_reduced_sweep_variant(s, 100.0); }},
      {"reverse", [](const TransferSettings& s) { return run_reverse(s); }},
      {"three-mode", [](const TransferSettings& s) { return reduced_three_mode(s); }},
  };
  bool pass = true;
  std::string detail;
  for (const auto& [name, run] : families) {
    TransferSettings a = fig3_settings();
    a.integration.tolerance = 1e-10;
    TransferSettings b = a;
    b.frame_offset = 13.7;
    const auto ra = run(a).trajectory;
    const auto rb = run(b).trajectory;
    double norm = std::max(ra.max_norm_drift, rb.max_norm_drift);
    for (std::size_t i = 0; i < ra.times.size(); ++i) {
      const double total = ra.spin_population[i] + ra.cavity_population[i] + ra.qubit_population[i];
      norm = std::max(norm, std::abs(total - 1.0));
    }
    double gauge = 0.0;
    for (std::size_t i = 0; i < ra.times.size(); ++i) {
      gauge = std::max({gauge, std::abs(ra.spin_population[i] - rb.spin_population[i]),
                        std::abs(ra.cavity_population[i] - rb.cavity_population[i]),
                        std::abs(ra.qubit_population[i] - rb.qubit_population[i])});
    }
    pass = pass && norm <= 1e-9 && gauge <= 1e-9 && ra.times == rb.times;
    detail += fmt("%s%s norm %.1e gauge %.1e", detail.empty() ? "" : "; ", name.c_str(), norm, gauge);
  }
  return {pass, detail + " (each <= 1e-9)"};
}

Outcome storage_crosscheck() {
  bool pass = true;
  std::string detail = "relative L2";
  for (double d : {0.5, 1.0, 2.0}) {
    StorageProblem p;
    p.envelope = Envelope::gaussian(0.5);
    p.optical_depth = d;
    const auto num = solve_propagation(p, 512, 4096, 10.0 * p.envelope.pulse_duration());
    const double dist = relative_l2_distance(num, analytic_coherence(p, num.time));
    pass = pass && dist <= 0.02;
    detail += fmt(" d=%g: %.4f", d, dist);
  }
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double d = 0.01 * k;
    const double identity = std::norm(gamma(Complex{0.0, -d})) * d * std::sinh(pi * d) / pi;
    worst = std::max(worst, std::abs(identity - 1.0));
  }
  pass = pass && worst <= 1e-10;
  return {pass, detail + fmt(" (each <= 0.02); gamma identity max error %.2e on d in (0, 10] (<= 1e-10)", worst)};
}

Outcome storage_efficiency_criterion() {
  bool pass = true;
  double flat_worst = 0.0;
  for (double d : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    StorageProblem p;
    p.envelope = Envelope::flat_spectrum(1.0);
    p.optical_depth = d;
    flat_worst = std::max(flat_worst, std::abs(storage_efficiency(p) - storage_prefactor(d)));
  }
  pass = flat_worst <= 1e-10;
  std::string detail = fmt("flat spectrum max |eta_S - (1 - e^-2 pi d)| = %.1e (<= 1e-10); optimized gaussian", flat_worst);
  for (double d : {1.0, 2.0, 5.0}) {
    StorageProblem p;
    p.envelope = Envelope::gaussian(0.5);
    p.optical_depth = d;
    const auto opt = optimize_envelope_width(p, 0.05, 4.0);
    pass = pass && opt.value > 0.90;
    detail += fmt(" d=%g: %.6f at width %.4f", d, opt.value, opt.argmax);
  }
  return {pass, detail + " (each > 0.90)"};
}

Outcome adiabatic_vs_staggered() {
  const TransferSettings s = fig3_settings();
  const double staggered = run_staggered(s).efficiency;
  bool pass = true;
  double best = 0.0;
  std::string detail;
  for (double duration : {5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 50.0, 75.0, 100.0}) {
    AdiabaticOptions o;
    o.sweep_duration = duration;
    const double eta = run_adiabatic(s, o).efficiency;
    best = std::max(best, eta);
    pass = pass && eta < staggered;
    detail += fmt(" %g:%.4f", duration, eta);
  }
  return {pass, fmt("staggered %.6f > best adiabatic %.6f; by duration", staggered, best) + detail};
}

Outcome end_to_end() {
  namespace fs = std::filesystem;
  RunConfig config = fig3_preset();
  config.storage.present = true;
  config.storage.problem.envelope = Envelope::gaussian(0.5);
  config.storage.problem.optical_depth = 2.0;
  config.storage.width_min = 0.05;
  config.storage.width_max = 4.0;
  OutputOptions output;
  output.out_dir = fs::temp_directory_path() / "crib_acceptance_end_to_end";
  fs::remove_all(output.out_dir);
  const auto report = cmd_transfer(config, output);
  const auto& eta = report.at("eta");
  const double total = eta.at("eta_total").get<double>();
  return {total >= 0.83, fmt("eta = eta_S * eta_T = %.6f * %.6f = %.6f (>= 0.83)", eta.at("eta_s").get<double>(),
                             eta.at("eta_t").get<double>(), total)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fig3", fig3},
      {"fig2", fig2},
      {"dephasing_estimate", dephasing_estimate},
      {"reduced_model", reduced_model},
      {"norm_gauge", norm_gauge},
      {"storage_crosscheck", storage_crosscheck},
      {"storage_efficiency", storage_efficiency_criterion},
      {"adiabatic_vs_staggered", adiabatic_vs_staggered},
      {"end_to_end", end_to_end},
  };
  CLI::App app{"Acceptance criteria"};
  std::string only;
  app.add_option("--criterion", only, "Run a single criterion");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  bool found = false;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && name != only) continue;
    found = true;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  if (!found) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
