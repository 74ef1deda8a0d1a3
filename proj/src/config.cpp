#include "copter/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "copter/errors.hpp"

namespace copter {

namespace {

using nlohmann::json;

void set_key(AppConfig& config, const std::string& key, const json& value) {
  auto as_double = [&]() -> double {
    if (!value.is_number()) {
      throw ConfigError("config key '" + key + "' expects a number");
    }
    return value.get<double>();
  };
  if (key == "adoption.beta_odds") config.adoption.beta_odds = as_double();
  else if (key == "adoption.intercept_mean")
    config.adoption.intercept_mean = as_double();
  else if (key == "adoption.intercept_sd") {
    config.adoption.intercept_sd = as_double();
    if (config.adoption.intercept_sd < 0) {
      throw ConfigError("adoption.intercept_sd must be >= 0");
    }
  } else if (key == "adoption.odds_cap")
    config.adoption.odds_cap = as_double();
  else if (key == "energy.fuel.a0") config.fuel.a0 = as_double();
  else if (key == "energy.fuel.a1") config.fuel.a1 = as_double();
  else if (key == "energy.fuel.a2") config.fuel.a2 = as_double();
  else if (key == "energy.bus_factor") {
    config.fuel.bus_per_passenger_factor = as_double();
    if (config.fuel.bus_per_passenger_factor < 0 ||
        config.fuel.bus_per_passenger_factor > 1) {
      throw ConfigError("energy.bus_factor must be within [0, 1]");
    }
  } else if (key == "delay.alpha")
    config.delay_alpha = as_double();
  else if (key == "delay.beta") {
    config.delay_beta = as_double();
    if (config.delay_beta < 1) throw ConfigError("delay.beta must be >= 1");
  } else if (key == "delay.default_capacity_vph") {
    config.default_capacity_vph = as_double();
    if (config.default_capacity_vph <= 0) {
      throw ConfigError("delay.default_capacity_vph must be > 0");
    }
  } else if (key == "selection.use_mode_probs") {
    if (!value.is_boolean()) {
      throw ConfigError("selection.use_mode_probs expects a boolean");
    }
    config.use_mode_probs = value.get<bool>();
  } else if (key == "selection.rule") {
    const std::string rule = value.get<std::string>();
    if (rule == "expected_saving") config.rule = SelectionRule::ExpectedSaving;
    else if (rule == "adoption_likelihood")
      config.rule = SelectionRule::AdoptionLikelihood;
    else
      throw ConfigError("unknown selection.rule '" + rule + "'");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void walk(AppConfig& config, const std::string& prefix, const json& node) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      walk(config, prefix.empty() ? it.key() : prefix + "." + it.key(),
           it.value());
    }
    return;
  }
  set_key(config, prefix, node);
}

}  // namespace

void apply_config_file(AppConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  walk(config, "", j);
}

void apply_config_override(AppConfig& config,
                           const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + key_eq_value + "'");
  }
  const std::string key = key_eq_value.substr(0, eq);
  const std::string raw = key_eq_value.substr(eq + 1);
  json value;
  if (raw == "true" || raw == "false") {
    value = raw == "true";
  } else {
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // bare string, e.g. selection.rule=expected_saving
    }
  }
  set_key(config, key, value);
}

AppConfig make_config(const std::string& config_file,
                      const std::vector<std::string>& overrides) {
  AppConfig config;
  if (!config_file.empty()) apply_config_file(config, config_file);
  for (const auto& entry : overrides) apply_config_override(config, entry);
  return config;
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("COPTER_LOG");
    if (!env) return LogLevel::Warn;
    const std::string value(env);
    if (value == "error") return LogLevel::Error;
    if (value == "warn") return LogLevel::Warn;
    if (value == "info") return LogLevel::Info;
    if (value == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)],
               message.c_str());
}

}  // namespace copter
