#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace noneq::experiments {

enum class ValueType { integer, real, reals, text, boolean };

struct KeySpec {
  std::string name;
  ValueType type;
  std::string default_value;
  /// Experiments the key applies to; empty means all.
  std::vector<std::string> experiments;
  std::string help;
  bool applies_to(const std::string& experiment) const;
};

const std::vector<std::string>& experiment_ids();
const std::vector<KeySpec>& config_keys();
const KeySpec* find_key(std::string_view name);
std::string type_name(ValueType type);

/// Values are stored in canonical text form (shortest round-trip reals,
/// ", "-joined lists), so printing and re-parsing is lossless.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  /// All applicable keys at their defaults.
  explicit ExperimentConfig(const std::string& experiment);

  const std::string& experiment() const { return experiment_; }
  /// Validates and stores a value. `line` only feeds error messages.
  void set(const std::string& key, const std::string& raw, int line = 0);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  bool is_explicit(const std::string& key) const { return explicit_.count(key) != 0; }

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  std::uint64_t integer(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// `key = value` lines in schema order, `experiment` first.
  std::string resolved_text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  bool operator==(const ExperimentConfig& other) const {
    return experiment_ == other.experiment_ && values_ == other.values_;
  }

 private:
  const std::string& raw(const std::string& key, ValueType expected) const;
  std::string experiment_;
  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

/// Grammar: one `key = value` per line, `#` starts a comment, blank lines
/// ignored. `experiment` must be set. Errors carry the line number.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);

std::string format_real(double value);

}  // namespace noneq::experiments
