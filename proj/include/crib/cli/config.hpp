#pragma once

// Run configuration: one YAML document with nested sections. See
// docs/config.md for the schema. Values are in G units unless `units: MHz`,
// in which case frequencies are given in MHz, times in microseconds, and `G`
// (in MHz) sets the conversion.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "crib/storage/storage.hpp"
#include "crib/sweep/sweep.hpp"
#include "crib/transfer/protocols.hpp"

namespace crib {

enum class UnitsMode { GUnits, MHz };

inline constexpr int kConfigVersion = 1;

struct StorageSection {
  bool present = false;
  StorageProblem problem;
  std::string table_path;  // set for table envelopes
  bool normalize_table = false;
  std::optional<double> width_min;  // width optimization range
  std::optional<double> width_max;
  bool crosscheck = false;  // also run the propagation solver
  std::size_t n_z = 512;
  std::size_t n_t = 4096;
  std::optional<double> t_final;
};

struct RunConfig {
  std::string source = "<defaults>";
  UnitsMode units = UnitsMode::GUnits;
  double g_mhz = 0.0;  // only meaningful in MHz mode
  std::size_t workers = 1;

  std::string protocol = "staggered";
  TransferSettings transfer;
  AdiabaticOptions adiabatic;
  double spin_park_detuning = 100.0;
  double travel_budget = std::numeric_limits<double>::infinity();

  StorageSection storage;
  SweepAxis axis1{"delta_IB", 0.0, 5.0, 40};
  SweepAxis axis2{"tau_R", 0.0, 0.5, 40};

  SweepSpec sweep_spec() const;
};

/// Protocol names accepted by `transfer.protocol`.
const std::vector<std::string>& protocol_names();

/// Parses a YAML document. Errors name the source, line and field.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Fully resolved configuration in G units. Feeding it back to parse_config
/// reproduces the same RunConfig.
std::string resolved_yaml(const RunConfig& config);

/// Shortest decimal form that parses back to the same double.
std::string shortest_double(double value);

}  // namespace crib
