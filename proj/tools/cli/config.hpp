#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "persist/environment.hpp"
#include "persist/model.hpp"

namespace CLI {
class App;
class Option;
}  // namespace CLI

namespace persist::cli {

using Json = nlohmann::ordered_json;

// Malformed or incomplete configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field = {})
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class OptKind { Number, Integer, Text, NumberList, AtomList };

struct OptionSpec {
  std::string key;  // config key; the flag is --key with '_' replaced by '-'
  OptKind kind = OptKind::Number;
  std::string help;
  Json fallback = nullptr;  // null: no default
};

// Options of one subcommand, merged from an optional JSON config file and the
// command line (flags win). Config files may hold the rates either in a
// "params" object or at top level; any other key must be a known option.
class RunConfig {
 public:
  RunConfig(std::vector<OptionSpec> specs, bool p_optional);

  void register_flags(CLI::App& sub);

  // Call after CLI parsing. Throws ConfigError.
  void finalize();

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  std::optional<double> maybe_number(const std::string& key) const;
  std::uint64_t integer(const std::string& key) const;
  std::optional<std::uint64_t> maybe_integer(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<Atom> atoms(const std::string& key) const;

  RawParams params(const std::vector<std::string>& supplied_elsewhere = {}) const;
  const Json& effective() const noexcept { return effective_; }

 private:
  const OptionSpec& spec(const std::string& key) const;
  Json from_flag(const OptionSpec& spec, const std::string& raw) const;
  void check_value(const OptionSpec& spec, const Json& value) const;
  void load_file(const std::string& path);

  std::vector<OptionSpec> specs_;
  bool p_optional_;
  std::string config_path_;
  std::map<std::string, std::string> flag_text_;
  std::map<std::string, CLI::Option*> flags_;
  std::map<std::string, double> param_flags_;
  std::map<std::string, CLI::Option*> param_options_;
  Json effective_ = Json::object();
  Json params_ = Json::object();
};

}  // namespace persist::cli
