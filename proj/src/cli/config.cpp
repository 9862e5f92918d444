#include "crib/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "crib/core/errors.hpp"

namespace crib {

namespace {

bool is_frequency_axis(const std::string& name) {
  return name == "delta_IB" || name == "kappa_sqrtN" || name == "delta_inh" || name == "Delta" ||
         name == "spin_detuning";
}

// Typed access to one mapping node with field-path and line diagnostics.
// Keys that are never read are reported as unknown by finish().
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, "expected a mapping");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? to_number(key) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return to_number(key);
  }
  double required_number(const std::string& key) {
    if (!has(key)) fail(node_, field(key) + ": missing required field");
    return to_number(key);
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const double v = to_number(key);
    if (v < 0.0 || v != std::floor(v) || v > 1e15) fail(node_[key], field(key) + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const YAML::Node n = node_[key];
    if (!n.IsScalar()) fail(n, field(key) + ": expected a string");
    return n.Scalar();
  }
  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<bool>();
    } catch (const YAML::Exception&) {
      fail(node_[key], field(key) + ": expected true or false");
    }
  }
  Section child(const std::string& key) {
    seen_.insert(key);
    YAML::Node n = node_ && node_.IsMap() ? node_[key] : YAML::Node();
    return Section(n, field(key), source_);
  }
  bool present() const { return node_ && !node_.IsNull(); }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.Scalar();
      if (!seen_.count(key)) fail(kv.first, "unknown field '" + field(key) + "'");
    }
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    std::ostringstream msg;
    msg << source_;
    if (at && at.Mark().line >= 0) msg << ':' << at.Mark().line + 1;
    msg << ": " << message;
    throw ConfigError(msg.str());
  }
  [[noreturn]] void fail_field(const std::string& key, const std::string& message) {
    fail(has(key) ? node_[key] : node_, field(key) + ": " + message);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  double to_number(const std::string& key) {
    const YAML::Node n = node_[key];
    if (!n.IsScalar()) fail(n, field(key) + ": expected a number");
    const std::string& s = n.Scalar();
    if (s == ".inf" || s == "+.inf" || s == ".Inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || std::isnan(v)) fail(n, field(key) + ": expected a number, got '" + s + "'");
    return v;
  }

  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

void read_axis(Section s, SweepAxis& axis, double freq_scale, double time_scale) {
  if (!s.present()) return;
  axis.name = s.text("name", axis.name);
  const double scale = is_frequency_axis(axis.name) ? freq_scale : axis.name == "tau_R" ? time_scale : 1.0;
  axis.min = s.number("min", axis.min / scale) * scale;
  axis.max = s.number("max", axis.max / scale) * scale;
  axis.n_points = s.count("n_points", axis.n_points);
  s.finish();
}

}  // namespace

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec spec;
  spec.axis1 = axis1;
  spec.axis2 = axis2;
  spec.fixed = transfer;
  spec.workers = workers;
  return spec;
}

const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{"staggered", "adiabatic", "reduced-sweep", "reverse", "three-mode"};
  return names;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig c;
  c.source = source;
  Section top(root, "", source);

  const std::size_t version = top.count("version", kConfigVersion);
  if (version != static_cast<std::size_t>(kConfigVersion)) {
    top.fail_field("version", "unsupported config version " + std::to_string(version));
  }
  const std::string units = top.text("units", "G");
  double freq = 1.0, time = 1.0;  // multipliers into G units
  if (units == "MHz") {
    c.units = UnitsMode::MHz;
    if (!top.has("G")) top.fail_field("G", "missing required field (G in MHz sets the unit in MHz mode)");
    c.g_mhz = top.required_number("G");
    if (!(c.g_mhz > 0.0)) top.fail_field("G", "must be > 0");
    freq = 1.0 / c.g_mhz;
    time = c.g_mhz;
  } else if (units == "G") {
    if (top.has("G")) top.fail_field("G", "only used with units: MHz");
  } else {
    top.fail_field("units", "expected 'G' or 'MHz', got '" + units + "'");
  }
  c.transfer.seed = static_cast<std::uint64_t>(top.count("seed", 0));
  c.workers = top.count("workers", c.workers);
  if (c.workers == 0) top.fail_field("workers", "must be >= 1");

  {
    Section t = top.child("transfer");
    auto& s = c.transfer;
    c.protocol = t.text("protocol", c.protocol);
    const auto& names = protocol_names();
    if (std::find(names.begin(), names.end(), c.protocol) == names.end()) {
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      t.fail_field("protocol", "unknown protocol '" + c.protocol + "'; valid: " + list);
    }
    s.n_spins = t.count("n_spins", s.n_spins);
    if (s.n_spins == 0) t.fail_field("n_spins", "must be >= 1");
    s.intrinsic_half_width = t.number("delta_IB", s.intrinsic_half_width / freq) * freq;
    s.induced_half_width = t.number("delta_inh", s.induced_half_width / freq) * freq;
    s.collective_coupling = t.number("kappa_sqrtN", s.collective_coupling / freq) * freq;
    const std::string profile = t.text("intrinsic_profile", std::string(to_string(s.intrinsic_profile)));
    const auto parsed = parse_detuning_profile(profile);
    if (!parsed) t.fail_field("intrinsic_profile", "expected uniform-grid, uniform-random or lorentzian");
    s.intrinsic_profile = *parsed;
    s.spin_center_detuning = t.number("spin_detuning", s.spin_center_detuning / freq) * freq;
    s.initial_cavity_detuning = t.number("Delta", s.initial_cavity_detuning / freq) * freq;
    s.rephasing_time = t.number("tau_R", s.rephasing_time / time) * time;
    s.trim_spin = t.number("trim_S", s.trim_spin);
    s.trim_cavity = t.number("trim_C", s.trim_cavity);
    s.park_duration = t.number("park_duration", s.park_duration / time) * time;
    s.gap = t.number("gap", s.gap / time) * time;
    s.ramp_duration = t.number("ramp_duration", s.ramp_duration / time) * time;
    s.integration.tolerance = t.number("tolerance", s.integration.tolerance);
    s.integration.n_samples = t.count("n_samples", s.integration.n_samples);
    c.travel_budget = t.number("travel_budget", c.travel_budget / freq) * freq;
    c.spin_park_detuning = t.number("spin_park_detuning", c.spin_park_detuning / freq) * freq;
    if (s.intrinsic_half_width < 0.0) t.fail_field("delta_IB", "must be >= 0");
    if (s.induced_half_width < 0.0) t.fail_field("delta_inh", "must be >= 0");
    if (s.collective_coupling < 0.0) t.fail_field("kappa_sqrtN", "must be >= 0");
    if (s.rephasing_time < 0.0) t.fail_field("tau_R", "must be >= 0");
    if (!(s.integration.tolerance >= 1e-12 && s.integration.tolerance <= 1e-6)) {
      t.fail_field("tolerance", "must lie in [1e-12, 1e-6]");
    }

    Section a = t.child("adiabatic");
    auto& ad = c.adiabatic;
    ad.sweep_duration = a.number("sweep_duration", ad.sweep_duration / time) * time;
    ad.spin_margin = a.number("spin_margin", ad.spin_margin / freq) * freq;
    ad.qubit_margin = a.number("qubit_margin", ad.qubit_margin / freq) * freq;
    ad.rephase_at_crossing = a.flag("rephase_at_crossing", ad.rephase_at_crossing);
    if (!(ad.sweep_duration > 0.0)) a.fail_field("sweep_duration", "must be > 0");
    a.finish();
    t.finish();
  }

  {
    Section st = top.child("storage");
    auto& sec = c.storage;
    sec.present = st.present();
    if (sec.present) {
      auto& p = sec.problem;
      const std::string kind_name = st.text("envelope", "gaussian");
      const auto kind = parse_envelope_kind(kind_name);
      if (!kind) st.fail_field("envelope", "expected gaussian, flat-spectrum or table");
      const double carrier = st.number("carrier", 0.0);
      const auto center = st.optional_number("center");
      if (*kind == EnvelopeKind::Table) {
        if (!st.has("table")) st.fail_field("table", "missing required field for a table envelope");
        std::filesystem::path path = st.text("table", "");
        if (path.is_relative() && source.front() != '<') {
          path = std::filesystem::path(source).parent_path() / path;
        }
        sec.table_path = std::filesystem::absolute(path).lexically_normal().string();
        std::ifstream in(sec.table_path);
        if (!in) st.fail_field("table", "cannot open '" + sec.table_path + "'");
        p.envelope = Envelope::read_csv(in);
        sec.normalize_table = st.flag("normalize", false);
        if (sec.normalize_table) p.envelope = p.envelope.normalized();
      } else {
        const double width = st.number("bandwidth_ratio", 0.5);
        if (!(width > 0.0)) st.fail_field("bandwidth_ratio", "must be > 0");
        p.envelope = *kind == EnvelopeKind::Gaussian ? Envelope::gaussian(width, carrier, center)
                                                     : Envelope::flat_spectrum(width, carrier, center);
        st.flag("normalize", false);
      }
      p.optical_depth = st.required_number("optical_depth");
      if (!(p.optical_depth >= 0.0)) st.fail_field("optical_depth", "must be >= 0");
      p.coupling = st.number("coupling", 1.0);
      p.spectral_offset = st.number("spectral_offset", 0.0);
      Section ow = st.child("optimize_width");
      if (ow.present()) {
        sec.width_min = ow.number("min", 0.05);
        sec.width_max = ow.number("max", 4.0);
        if (!(*sec.width_min > 0.0 && *sec.width_max >= *sec.width_min)) {
          ow.fail_field("min", "need 0 < min <= max");
        }
      }
      ow.finish();
      Section cc = st.child("crosscheck");
      sec.crosscheck = cc.flag("enabled", sec.crosscheck);
      sec.n_z = cc.count("n_z", sec.n_z);
      sec.n_t = cc.count("n_t", sec.n_t);
      sec.t_final = cc.optional_number("t_final");
      cc.finish();
    }
    st.finish();
  }

  {
    Section sw = top.child("sweep");
    read_axis(sw.child("axis1"), c.axis1, freq, time);
    read_axis(sw.child("axis2"), c.axis2, freq, time);
    sw.finish();
  }
  top.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string shortest_double(double value) {
  if (std::isinf(value)) return value > 0 ? ".inf" : "-.inf";
  if (std::isnan(value)) return ".nan";
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, result.ptr};
}

std::string resolved_yaml(const RunConfig& c) {
  YAML::Emitter out;
  auto num = [&](const char* key, double v) { out << YAML::Key << key << YAML::Value << shortest_double(v); };
  auto cnt = [&](const char* key, std::size_t v) { out << YAML::Key << key << YAML::Value << v; };
  auto str = [&](const char* key, const std::string& v) { out << YAML::Key << key << YAML::Value << v; };
  auto axis = [&](const char* key, const SweepAxis& a) {
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    str("name", a.name);
    num("min", a.min);
    num("max", a.max);
    cnt("n_points", a.n_points);
    out << YAML::EndMap;
  };
  const auto& s = c.transfer;
  out << YAML::BeginMap;
  cnt("version", kConfigVersion);
  str("units", "G");
  cnt("seed", s.seed);
  cnt("workers", c.workers);
  out << YAML::Key << "transfer" << YAML::Value << YAML::BeginMap;
  str("protocol", c.protocol);
  cnt("n_spins", s.n_spins);
  num("delta_IB", s.intrinsic_half_width);
  num("delta_inh", s.induced_half_width);
  num("kappa_sqrtN", s.collective_coupling);
  str("intrinsic_profile", std::string(to_string(s.intrinsic_profile)));
  num("spin_detuning", s.spin_center_detuning);
  num("Delta", s.initial_cavity_detuning);
  num("tau_R", s.rephasing_time);
  num("trim_S", s.trim_spin);
  num("trim_C", s.trim_cavity);
  num("park_duration", s.park_duration);
  num("gap", s.gap);
  num("ramp_duration", s.ramp_duration);
  num("tolerance", s.integration.tolerance);
  cnt("n_samples", s.integration.n_samples);
  num("travel_budget", c.travel_budget);
  num("spin_park_detuning", c.spin_park_detuning);
  out << YAML::Key << "adiabatic" << YAML::Value << YAML::BeginMap;
  num("sweep_duration", c.adiabatic.sweep_duration);
  num("spin_margin", c.adiabatic.spin_margin);
  num("qubit_margin", c.adiabatic.qubit_margin);
  out << YAML::Key << "rephase_at_crossing" << YAML::Value << c.adiabatic.rephase_at_crossing;
  out << YAML::EndMap << YAML::EndMap;

  if (c.storage.present) {
    const auto& p = c.storage.problem;
    out << YAML::Key << "storage" << YAML::Value << YAML::BeginMap;
    str("envelope", std::string(to_string(p.envelope.kind())));
    if (p.envelope.kind() == EnvelopeKind::Table) {
      str("table", c.storage.table_path);
      out << YAML::Key << "normalize" << YAML::Value << c.storage.normalize_table;
    } else {
      num("bandwidth_ratio", p.envelope.bandwidth());
      num("carrier", p.envelope.carrier());
      if (p.envelope.has_explicit_center()) num("center", p.envelope.center());
    }
    num("optical_depth", p.optical_depth);
    num("coupling", p.coupling);
    num("spectral_offset", p.spectral_offset);
    if (c.storage.width_min) {
      out << YAML::Key << "optimize_width" << YAML::Value << YAML::BeginMap;
      num("min", *c.storage.width_min);
      num("max", *c.storage.width_max);
      out << YAML::EndMap;
    }
    out << YAML::Key << "crosscheck" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "enabled" << YAML::Value << c.storage.crosscheck;
    cnt("n_z", c.storage.n_z);
    cnt("n_t", c.storage.n_t);
    if (c.storage.t_final) num("t_final", *c.storage.t_final);
    out << YAML::EndMap << YAML::EndMap;
  }

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  axis("axis1", c.axis1);
  axis("axis2", c.axis2);
  out << YAML::EndMap << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace crib
