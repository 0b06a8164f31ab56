#include "aqs/config.hpp"

#include <algorithm>
#include <set>

#include "aqs/error.hpp"
#include "aqs/io_util.hpp"

namespace aqs {
namespace {

using VT = ValueType;

KeySpec req(std::string key, VT t, std::string help) { return {std::move(key), t, std::nullopt, true, true, std::move(help)}; }
KeySpec opt(std::string key, VT t, std::string help) { return {std::move(key), t, std::nullopt, false, true, std::move(help)}; }
KeySpec def(std::string key, VT t, std::string value, std::string help) {
  return {std::move(key), t, std::move(value), false, true, std::move(help)};
}

std::vector<KeySpec> with_common(std::vector<KeySpec> keys, std::string default_output) {
  keys.push_back({"output", VT::text, std::move(default_output), false, false, "output file path"});
  keys.push_back({"threads", VT::integer, "0", false, false, "worker threads (0 = hardware concurrency)"});
  keys.push_back(opt("seed", VT::integer, "seed for every stochastic step"));
  return keys;
}

const std::map<std::string, std::vector<KeySpec>, std::less<>>& key_table() {
  static const std::map<std::string, std::vector<KeySpec>, std::less<>> table = {
      {"enaqt-sweep",
       with_common(
           {
               req("network", VT::path, "network or waveguide-geometry file"),
               def("source", VT::positive_integer, "1", "source site (1-based)"),
               req("sink", VT::positive_integer, "site coupled to the sink (1-based)"),
               req("trap_rate", VT::positive_real, "trapping rate Gamma into the sink"),
               def("recombination_rate", VT::non_negative_real, "0", "recombination rate kappa"),
               def("gamma_min", VT::positive_real, "0.001", "smallest dephasing rate of the log grid"),
               def("gamma_max", VT::positive_real, "1000", "largest dephasing rate of the log grid"),
               def("gamma_steps", VT::positive_integer, "25", "points in the log grid"),
               opt("gamma_grid", VT::real_list, "explicit dephasing grid (overrides the log grid)"),
               opt("t_max", VT::positive_real, "horizon (default 1e3 / mean coupling)"),
               def("tol", VT::positive_real, "1e-9", "integrator and convergence tolerance"),
               def("disorder_sigma", VT::non_negative_real, "0", "static on-site disorder (needs seed)"),
           },
           "enaqt-sweep.csv")},
      {"walk",
       with_common(
           {
               req("network", VT::path, "network or waveguide-geometry file"),
               req("input_mode", VT::positive_integer, "injected mode (1-based)"),
               opt("time", VT::non_negative_real, "evolution time (reciprocal energy units)"),
               opt("length", VT::non_negative_real, "coupling length in metres (needs refractive_index)"),
               opt("refractive_index", VT::positive_real, "refractive index for the length-to-time map"),
               def("n_segments", VT::positive_integer, "1", "phase-kick segments per trajectory"),
               def("phase_sigma", VT::non_negative_real, "0", "phase noise per segment in radians (needs seed)"),
               def("shots", VT::positive_integer, "1", "trajectories in the ensemble"),
           },
           "walk.csv")},
      {"bh-spectrum",
       with_common(
           {
               req("sites", VT::positive_integer, "lattice sites L"),
               req("bosons", VT::integer, "boson number N"),
               req("J", VT::non_negative_real, "hopping"),
               req("U", VT::non_negative_real, "on-site interaction"),
               def("lattice", VT::text, "chain", "'chain' or '<rows>x<cols>'"),
               def("delta", VT::non_negative_real, "0.03", "relative modulation amplitude of U"),
               def("nu_min", VT::non_negative_real, "0", "lowest drive frequency"),
               opt("nu_max", VT::positive_real, "highest drive frequency"),
               def("nu_steps", VT::positive_integer, "101", "drive frequencies in the grid"),
               opt("nu_grid", VT::real_list, "explicit frequency grid (overrides nu_min/nu_max/nu_steps)"),
               def("t_drive", VT::positive_real, "100", "drive duration"),
               def("tol", VT::positive_real, "1e-10", "integrator tolerance"),
           },
           "bh-spectrum.csv")},
      {"bh-scan",
       with_common(
           {
               req("sites", VT::positive_integer, "lattice sites L"),
               req("bosons", VT::integer, "boson number N"),
               def("U", VT::positive_real, "1", "on-site interaction"),
               def("lattice", VT::text, "chain", "'chain' or '<rows>x<cols>'"),
               req("j_grid", VT::real_list, "ascending list of J/U values"),
           },
           "bh-scan.csv")},
      {"validate",
       with_common(
           {
               req("source", VT::path, "source-model network file"),
               req("target", VT::path, "target-model network file"),
               req("mapping", VT::path, "mapping record file"),
               def("tol", VT::non_negative_real, "1e-12", "isomorphism tolerance"),
               def("role", VT::text, "simulation", "'simulation' or 'emulation'"),
               opt("external", VT::path, "fuller model of the physical target (external check)"),
               def("external_tol", VT::non_negative_real, "0.01", "approximation-bound tolerance"),
               opt("external_states", VT::positive_integer, "low-lying states used by the bound (default min(4, dim))"),
               def("hardness_proof", VT::boolean, "false", "problem proven classically hard"),
               def("efficient_classical_known", VT::boolean, "false", "an efficient classical algorithm is known"),
               def("scalable_accuracy", VT::boolean, "false", "simulator scales up without losing accuracy"),
           },
           "validate.json")},
  };
  return table;
}

std::optional<std::string> canonical_value(const KeySpec& spec, const std::string& raw, std::string& error) {
  switch (spec.type) {
    case VT::path: {
      std::error_code ec;
      if (!std::filesystem::is_regular_file(raw, ec)) {
        error = "file '" + raw + "' does not exist";
        return std::nullopt;
      }
      return raw;
    }
    case VT::real:
    case VT::positive_real:
    case VT::non_negative_real: {
      auto v = parse_double(raw);
      if (!v) {
        error = "expected a number, got '" + raw + "'";
        return std::nullopt;
      }
      if (spec.type == VT::positive_real && !(*v > 0.0)) {
        error = "must be > 0";
        return std::nullopt;
      }
      if (spec.type == VT::non_negative_real && !(*v >= 0.0)) {
        error = "must be >= 0";
        return std::nullopt;
      }
      return format_double(*v);
    }
    case VT::integer:
    case VT::positive_integer: {
      auto v = parse_integer(raw);
      if (!v) {
        error = "expected an integer, got '" + raw + "'";
        return std::nullopt;
      }
      if (spec.type == VT::positive_integer && *v < 1) {
        error = "must be >= 1";
        return std::nullopt;
      }
      if (spec.key != "seed" && *v < 0) {
        error = "must be >= 0";
        return std::nullopt;
      }
      return std::to_string(*v);
    }
    case VT::boolean:
      if (raw == "true" || raw == "1" || raw == "yes") return "true";
      if (raw == "false" || raw == "0" || raw == "no") return "false";
      error = "expected true or false, got '" + raw + "'";
      return std::nullopt;
    case VT::text:
      if (raw.empty()) {
        error = "must not be empty";
        return std::nullopt;
      }
      return raw;
    case VT::real_list: {
      std::string out;
      for (const auto& item : split_char(raw, ',')) {
        auto v = parse_double(item);
        if (!v) {
          error = "expected a comma-separated list of numbers";
          return std::nullopt;
        }
        if (!out.empty()) out += ',';
        out += format_double(*v);
      }
      return out;
    }
  }
  return std::nullopt;
}

std::string where(int line, const std::string& key) {
  if (line > 0) return "line " + std::to_string(line) + ": ";
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return "--" + flag + ": ";
}

std::vector<double> as_list(const std::string& canonical) {
  std::vector<double> out;
  for (const auto& item : split_char(canonical, ',')) out.push_back(*parse_double(item));
  return out;
}

bool ascending(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

bool valid_lattice(const std::string& s) {
  if (s == "chain") return true;
  auto x = s.find('x');
  if (x == std::string::npos) return false;
  auto r = parse_integer(s.substr(0, x));
  auto c = parse_integer(s.substr(x + 1));
  return r && c && *r >= 1 && *c >= 1;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, _] : key_table()) n.push_back(k);
    return n;
  }();
  return names;
}

const std::vector<KeySpec>& command_keys(std::string_view command) {
  auto it = key_table().find(command);
  if (it == key_table().end()) throw InputError("unknown command '" + std::string(command) + "'");
  return it->second;
}

bool ExperimentConfig::has(std::string_view key) const { return values_.find(key) != values_.end(); }

const std::string& ExperimentConfig::text(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("config has no value for '" + std::string(key) + "'");
  return it->second;
}

double ExperimentConfig::real(std::string_view key) const { return *parse_double(text(key)); }
long long ExperimentConfig::integer(std::string_view key) const { return *parse_integer(text(key)); }
bool ExperimentConfig::boolean(std::string_view key) const { return text(key) == "true"; }
std::vector<double> ExperimentConfig::real_list(std::string_view key) const { return as_list(text(key)); }
std::filesystem::path ExperimentConfig::path(std::string_view key) const { return text(key); }

std::optional<std::uint64_t> ExperimentConfig::seed() const {
  if (!has("seed")) return std::nullopt;
  return static_cast<std::uint64_t>(integer("seed"));
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_); }

ExperimentConfig validate_config(std::string command, const std::vector<RawEntry>& entries) {
  std::vector<std::string> errors;
  auto table_it = key_table().find(command);
  if (table_it == key_table().end()) {
    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    throw ParseError({"unknown command '" + command + "' (expected one of: " + names + ")"});
  }
  const auto& keys = table_it->second;

  ExperimentConfig cfg;
  cfg.command_ = command;
  std::map<std::string, int> line_of;
  for (const auto& e : entries) {
    auto spec = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.key == e.key; });
    if (spec == keys.end()) {
      errors.push_back(where(e.line, e.key) + "unknown key '" + e.key + "' for command '" + command + "'");
      continue;
    }
    if (line_of.count(e.key)) {
      errors.push_back(where(e.line, e.key) + "key '" + e.key + "' given twice");
      continue;
    }
    line_of[e.key] = e.line;
    std::string err;
    auto v = canonical_value(*spec, e.value, err);
    if (!v) {
      errors.push_back(where(e.line, e.key) + e.key + ": " + err);
      continue;
    }
    cfg.values_[e.key] = *v;
  }
  for (const auto& k : keys) {
    if (cfg.values_.count(k.key) || line_of.count(k.key)) continue;
    if (k.default_value) {
      cfg.values_[k.key] = *k.default_value;
    } else if (k.required) {
      errors.push_back("missing required key '" + k.key + "'");
    }
  }

  auto loc = [&](const std::string& key) {
    auto it = line_of.find(key);
    return it == line_of.end() ? std::string() : where(it->second, key);
  };
  auto check_grid = [&](const std::string& key) {
    if (cfg.has(key) && !ascending(cfg.real_list(key))) errors.push_back(loc(key) + "grid must ascend");
  };
  const bool have_seed = cfg.has("seed");

  if (command == "enaqt-sweep") {
    check_grid("gamma_grid");
    if (cfg.has("gamma_grid")) {
      for (double g : cfg.real_list("gamma_grid"))
        if (!(g > 0.0)) {
          errors.push_back(loc("gamma_grid") + "dephasing rates must be > 0");
          break;
        }
    } else if (cfg.has("gamma_min") && cfg.has("gamma_max") && !(cfg.real("gamma_max") > cfg.real("gamma_min"))) {
      errors.push_back(loc("gamma_max") + "grid must ascend (gamma_max <= gamma_min)");
    }
    if (cfg.has("gamma_steps") && cfg.integer("gamma_steps") < 2 && !cfg.has("gamma_grid"))
      errors.push_back(loc("gamma_steps") + "gamma_steps must be >= 2");
    if (cfg.has("disorder_sigma") && cfg.real("disorder_sigma") > 0.0 && !have_seed)
      errors.push_back(loc("disorder_sigma") + "disorder is stochastic: a seed is required");
  } else if (command == "walk") {
    const bool t = cfg.has("time"), z = cfg.has("length");
    if (t == z) errors.push_back("give exactly one of 'time' or 'length'");
    if (z && !cfg.has("refractive_index")) errors.push_back(loc("length") + "'length' needs 'refractive_index'");
    if (cfg.has("phase_sigma") && cfg.real("phase_sigma") > 0.0 && !have_seed)
      errors.push_back(loc("phase_sigma") + "phase noise is stochastic: a seed is required");
  } else if (command == "bh-spectrum" || command == "bh-scan") {
    if (cfg.has("lattice") && !valid_lattice(cfg.text("lattice")))
      errors.push_back(loc("lattice") + "lattice must be 'chain' or '<rows>x<cols>'");
    if (command == "bh-spectrum") {
      check_grid("nu_grid");
      if (!cfg.has("nu_grid")) {
        if (!cfg.has("nu_max"))
          errors.push_back("missing 'nu_max' (or an explicit 'nu_grid')");
        else if (cfg.has("nu_min") && !(cfg.real("nu_max") > cfg.real("nu_min")))
          errors.push_back(loc("nu_max") + "grid must ascend (nu_max <= nu_min)");
        if (cfg.has("nu_steps") && cfg.integer("nu_steps") < 2)
          errors.push_back(loc("nu_steps") + "nu_steps must be >= 2");
      }
      if (cfg.has("delta") && cfg.real("delta") > 0.1) errors.push_back(loc("delta") + "delta must lie in [0, 0.1]");
    } else {
      check_grid("j_grid");
    }
  } else if (command == "validate") {
    if (cfg.has("role") && cfg.text("role") != "simulation" && cfg.text("role") != "emulation")
      errors.push_back(loc("role") + "role must be 'simulation' or 'emulation'");
  }
  if (!errors.empty()) throw ParseError(std::move(errors));

  std::string canonical = "command=" + command + "\n";
  for (const auto& k : keys) {
    if (!k.hashed || !cfg.has(k.key)) continue;
    std::string v = cfg.text(k.key);
    if (k.type == VT::path) v = "content:" + hex64(fnv1a64(read_file(v)));
    canonical += k.key + "=" + v + "\n";
  }
  cfg.canonical_ = std::move(canonical);
  return cfg;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<RawEntry> entries;
  std::vector<std::string> errors;
  std::optional<std::string> command;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(start, end - start);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (!raw.empty()) {
      auto eq = raw.find('=');
      if (eq == std::string_view::npos) {
        errors.push_back("line " + std::to_string(number) + ": expected 'key = value'");
      } else {
        std::string key(trim(raw.substr(0, eq)));
        std::string value(trim(raw.substr(eq + 1)));
        if (key == "command") {
          if (command) errors.push_back("line " + std::to_string(number) + ": command given twice");
          command = value;
        } else {
          entries.push_back({key, value, number});
        }
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  if (!command) errors.push_back("missing 'command = <name>' line");
  if (command && !base_dir.empty() && key_table().count(*command)) {
    for (const auto& k : command_keys(*command)) {
      if (k.type != VT::path) continue;
      for (auto& e : entries)
        if (e.key == k.key && !e.value.empty() && std::filesystem::path(e.value).is_relative())
          e.value = (base_dir / e.value).lexically_normal().string();
    }
  }
  if (!errors.empty() || !command) {
    // Still report key-level problems when the command is known.
    if (command && key_table().count(*command)) {
      try {
        validate_config(*command, entries);
      } catch (const ParseError& e) {
        errors.insert(errors.end(), e.violations().begin(), e.violations().end());
      }
    }
    throw ParseError(std::move(errors));
  }
  return validate_config(*command, entries);
}

}  // namespace aqs
