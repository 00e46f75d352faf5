#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

namespace persist::cli {

namespace {

const char* const kParamKeys[] = {"lambda", "a", "b", "dn", "dr", "p"};

bool is_param_key(const std::string& key) {
  return std::find(std::begin(kParamKeys), std::end(kParamKeys), key) != std::end(kParamKeys);
}

// "--init-r,--init_r": both spellings are accepted.
std::string flag_name(const std::string& key) {
  std::string dashed = "--" + key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  if (key.find('_') == std::string::npos) return dashed;
  return dashed + ",--" + key;
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("option '" + key + "': '" + text + "' is not a number", key);
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const char* type_name(OptKind kind) {
  switch (kind) {
    case OptKind::Number: return "FLOAT";
    case OptKind::Integer: return "UINT";
    case OptKind::Text: return "TEXT";
    case OptKind::NumberList: return "FLOAT,...";
    case OptKind::AtomList: return "T:W,...";
  }
  return "TEXT";
}

}  // namespace

RunConfig::RunConfig(std::vector<OptionSpec> specs, bool p_optional)
    : specs_(std::move(specs)), p_optional_(p_optional) {}

void RunConfig::register_flags(CLI::App& sub) {
  sub.add_option("--config", config_path_, "JSON config file; command-line flags override it");
  for (const char* key : kParamKeys) {
    const std::string help = std::string(key) == "p" ? "kill probability p" : std::string("rate ") + key;
    param_options_[key] = sub.add_option(flag_name(key), param_flags_[key], help);
  }
  for (const OptionSpec& s : specs_) {
    std::string help = s.help;
    if (!s.fallback.is_null()) help += " (default " + s.fallback.dump() + ")";
    flags_[s.key] = sub.add_option(flag_name(s.key), flag_text_[s.key], help)->type_name(type_name(s.kind));
  }
}

const OptionSpec& RunConfig::spec(const std::string& key) const {
  for (const OptionSpec& s : specs_) {
    if (s.key == key) return s;
  }
  throw std::logic_error("unregistered option " + key);
}

void RunConfig::check_value(const OptionSpec& s, const Json& v) const {
  auto fail = [&](const char* what) {
    throw ConfigError("config key '" + s.key + "' must be " + what, s.key);
  };
  switch (s.kind) {
    case OptKind::Number:
      if (!v.is_number()) fail("a number");
      break;
    case OptKind::Integer:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        fail("a nonnegative integer");
      }
      break;
    case OptKind::Text:
      if (!v.is_string()) fail("a string");
      break;
    case OptKind::NumberList:
      if (!v.is_array()) fail("an array of numbers");
      for (const Json& x : v) {
        if (!x.is_number()) fail("an array of numbers");
      }
      break;
    case OptKind::AtomList:
      if (!v.is_array()) fail("an array of [time, weight] pairs");
      for (const Json& x : v) {
        if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number()) {
          fail("an array of [time, weight] pairs");
        }
      }
      break;
  }
}

Json RunConfig::from_flag(const OptionSpec& s, const std::string& raw) const {
  switch (s.kind) {
    case OptKind::Number:
      return parse_double(raw, s.key);
    case OptKind::Integer: {
      if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("option '" + s.key + "': '" + raw + "' is not a nonnegative integer", s.key);
      }
      try {
        return static_cast<std::uint64_t>(std::stoull(raw));
      } catch (const std::exception&) {
        throw ConfigError("option '" + s.key + "': '" + raw + "' is out of range", s.key);
      }
    }
    case OptKind::Text:
      return raw;
    case OptKind::NumberList: {
      Json arr = Json::array();
      for (const std::string& item : split(raw, ',')) arr.push_back(parse_double(item, s.key));
      return arr;
    }
    case OptKind::AtomList: {
      Json arr = Json::array();
      for (const std::string& item : split(raw, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          throw ConfigError("option '" + s.key + "': expected time:weight, got '" + item + "'", s.key);
        }
        arr.push_back(Json::array({parse_double(item.substr(0, colon), s.key),
                                   parse_double(item.substr(colon + 1), s.key)}));
      }
      return arr;
    }
  }
  return nullptr;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "config");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "': parse error at " + position_of(text, e.byte), "config");
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object", "config");

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "params") {
      if (!it->is_object()) throw ConfigError("config key 'params' must be an object", "params");
      for (auto p = it->begin(); p != it->end(); ++p) {
        if (!is_param_key(p.key())) throw ConfigError("unknown parameter 'params." + p.key() + "'", p.key());
        if (!p->is_number()) throw ConfigError("parameter '" + p.key() + "' must be a number", p.key());
        params_[p.key()] = *p;
      }
    } else if (is_param_key(key)) {
      if (!it->is_number()) throw ConfigError("parameter '" + key + "' must be a number", key);
      params_[key] = *it;
    } else {
      const auto found = std::find_if(specs_.begin(), specs_.end(), [&](const OptionSpec& s) { return s.key == key; });
      if (found == specs_.end()) throw ConfigError("unknown config key '" + key + "'", key);
      check_value(*found, *it);
      effective_[key] = *it;
    }
  }
}

void RunConfig::finalize() {
  if (!config_path_.empty()) load_file(config_path_);
  for (const char* key : kParamKeys) {
    if (param_options_[key]->count() > 0) params_[key] = param_flags_[key];
  }
  for (const OptionSpec& s : specs_) {
    if (flags_[s.key]->count() > 0) {
      effective_[s.key] = from_flag(s, flag_text_[s.key]);
    } else if (!effective_.contains(s.key) && !s.fallback.is_null()) {
      effective_[s.key] = s.fallback;
    }
  }
}

bool RunConfig::has(const std::string& key) const {
  return effective_.contains(key) && !effective_[key].is_null();
}

double RunConfig::number(const std::string& key) const {
  spec(key);
  if (!has(key)) throw ConfigError("missing required option '" + key + "'", key);
  return effective_[key].get<double>();
}

std::optional<double> RunConfig::maybe_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::uint64_t RunConfig::integer(const std::string& key) const {
  spec(key);
  if (!has(key)) throw ConfigError("missing required option '" + key + "'", key);
  return effective_[key].get<std::uint64_t>();
}

std::optional<std::uint64_t> RunConfig::maybe_integer(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

std::string RunConfig::text(const std::string& key) const {
  spec(key);
  if (!has(key)) throw ConfigError("missing required option '" + key + "'", key);
  return effective_[key].get<std::string>();
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  spec(key);
  if (!has(key)) throw ConfigError("missing required option '" + key + "'", key);
  return effective_[key].get<std::vector<double>>();
}

std::vector<Atom> RunConfig::atoms(const std::string& key) const {
  spec(key);
  if (!has(key)) throw ConfigError("missing required option '" + key + "'", key);
  std::vector<Atom> out;
  for (const Json& pair : effective_[key]) out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  return out;
}

RawParams RunConfig::params(const std::vector<std::string>& supplied_elsewhere) const {
  auto get = [&](const char* key) -> double {
    if (!params_.contains(key)) {
      if (std::string(key) == "p" && p_optional_) return 1.0;
      // Placeholder; the caller overwrites it (e.g. a sweep axis).
      if (std::find(supplied_elsewhere.begin(), supplied_elsewhere.end(), key) != supplied_elsewhere.end()) return 0.0;
      throw ConfigError(std::string("missing model parameter '") + key + "'", key);
    }
    return params_[key].get<double>();
  };
  return {get("lambda"), get("a"), get("b"), get("dn"), get("dr"), get("p")};
}

}  // namespace persist::cli
