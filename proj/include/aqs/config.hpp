#pragma once

// Experiment configs for the command-line tool. A config file is a list of
// `key = value` lines ('#' comments allowed) whose first meaningful key is
// `command`. The same keys can be given as command-line flags; both routes go
// through one validator, which fills documented defaults, rejects unknown
// keys and reports every violation at once.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aqs {

inline constexpr std::string_view kToolName = "aqsim";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ValueType { path, real, positive_real, non_negative_real, integer, positive_integer, boolean, text, real_list };

struct KeySpec {
  std::string key;
  ValueType type;
  std::optional<std::string> default_value;  // nullopt: required unless listed as optional
  bool required = false;
  bool hashed = true;  // false for keys that cannot change results (output, threads)
  std::string help;
};

// Keys understood by `command`, including the common ones. Throws InputError
// for an unknown command.
const std::vector<KeySpec>& command_keys(std::string_view command);
const std::vector<std::string>& command_names();

struct RawEntry {
  std::string key;
  std::string value;
  int line = 0;  // 0 for command-line flags
};

class ExperimentConfig {
 public:
  const std::string& command() const noexcept { return command_; }
  bool has(std::string_view key) const;
  const std::string& text(std::string_view key) const;
  double real(std::string_view key) const;
  long long integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  std::vector<double> real_list(std::string_view key) const;
  std::filesystem::path path(std::string_view key) const;
  std::optional<std::uint64_t> seed() const;

  // Sorted `key=value` lines of every hashed key, with numbers in canonical
  // form and file references replaced by a digest of their contents.
  const std::string& canonical() const noexcept { return canonical_; }
  std::uint64_t hash() const;

  friend ExperimentConfig validate_config(std::string command, const std::vector<RawEntry>& entries);

 private:
  std::string command_;
  std::map<std::string, std::string, std::less<>> values_;
  std::string canonical_;
};

// Parses config text. Throws ParseError listing all violations with line
// numbers. Relative input-file paths are taken relative to `base_dir` when it
// is non-empty; `output` always stays relative to the working directory.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

// Validates already-split entries for `command` (used for flags).
ExperimentConfig validate_config(std::string command, const std::vector<RawEntry>& entries);

}  // namespace aqs
