#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "copter/adoption.hpp"
#include "copter/copter.hpp"
#include "copter/energy.hpp"

namespace copter {

// Model-parameter configuration shared by the CLI workflows. Values merge
// in order: built-in defaults, then a JSON config file, then --set
// key=value command-line overrides. Unknown keys are rejected.
//
// Keys:
//   adoption.beta_odds, adoption.intercept_mean, adoption.intercept_sd,
//   adoption.odds_cap,
//   energy.fuel.a0, energy.fuel.a1, energy.fuel.a2, energy.bus_factor,
//   delay.alpha, delay.beta, delay.default_capacity_vph,
//   selection.use_mode_probs, selection.rule
struct AppConfig {
  AdoptionModel adoption;
  FuelModel fuel;
  double delay_alpha = 0.15;
  double delay_beta = 4.0;
  double default_capacity_vph = 1800;
  bool use_mode_probs = false;
  SelectionRule rule = SelectionRule::ExpectedSaving;
};

void apply_config_file(AppConfig& config, const std::filesystem::path& path);
void apply_config_override(AppConfig& config, const std::string& key_eq_value);

AppConfig make_config(const std::string& config_file,
                      const std::vector<std::string>& overrides);

// COPTER_LOG in {error, warn, info, debug}; messages go to stderr.
enum class LogLevel { Error = 0, Warn, Info, Debug };
LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

}  // namespace copter
