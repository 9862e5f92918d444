#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "crib/cli/config.hpp"

namespace crib {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct OutputOptions {
  std::filesystem::path out_dir = ".";
  std::string format = "csv";  // csv | json, for the tabular outputs
};

/// Every preset value spelled out, so a reproduction does not depend on
/// library defaults.
RunConfig fig3_preset();
RunConfig fig2_preset();

/// Each command writes its files into out_dir (plus resolved_config.yaml)
/// and returns the report it wrote.
nlohmann::json cmd_storage(const RunConfig& config, const OutputOptions& output);
nlohmann::json cmd_transfer(const RunConfig& config, const OutputOptions& output);
nlohmann::json cmd_sweep(const RunConfig& config, bool resume, const OutputOptions& output);

struct EstimateResult {
  double argument = 0.0;  // delta_IB * T_S
  EtaEstimate estimate;
};
EstimateResult cmd_estimate(double intrinsic_half_width, double spin_pulse_time);
void print_estimate(std::ostream& out, const EstimateResult& result, const std::string& format);

/// The whole command line. Returns the process exit code: 0 on success,
/// 2 for configuration errors, 3 for numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crib
