#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "copter/copter.hpp"

namespace copter {

// Deterministic synthetic desk-scale network: an n x n grid of two-way
// drive and walk links, bus lines along selected rows and subway lines
// along selected columns. Unset row/column lists select the defaults
// (every 3rd row / middle column); explicit empty lists drop the lines.
struct GridSpec {
  int n = 8;
  double spacing_m = 500;
  double origin_lat = 34.05;
  double origin_lon = -118.25;
  double drive_speed_mps = 13.9;
  double walk_speed_mps = 1.4;
  double drive_capacity_vph = 1800;
  std::optional<std::vector<int>> bus_rows;
  std::optional<std::vector<int>> subway_cols;
  int bus_headway_s = 600;
  double bus_speed_mps = 8.33;
  int bus_dwell_s = 30;
  int subway_headway_s = 900;
  double subway_speed_mps = 16.67;
  int subway_dwell_s = 20;
  int service_start_s = 5 * 3600;
  int service_end_s = 24 * 3600;
};

TransportGraph make_grid_network(const GridSpec& spec);

// Profiles come either from a source CSV (rows sampled with replacement) or
// from per-feature discrete marginal distributions.
struct PopulationSpec {
  int size = 0;
  std::string source_csv;
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>
      marginals;  // feature -> (value, weight) list
};

struct Traveler {
  TravelerProfile profile;
  Query query;
  std::uint64_t seed = 0;
};

// Samples profiles, assigns random origin/destination pairs on the network
// and departure times within the period window. Deterministic per seed.
std::vector<Traveler> generate_population(const PopulationSpec& spec,
                                          const TransportGraph& graph,
                                          int period_start_s, int period_end_s,
                                          int trip_slack_s,
                                          std::uint64_t seed);

enum class Condition { Baseline, Influence };

struct Scenario {
  std::uint64_t seed = 0;
  TransportGraph graph;
  std::vector<Traveler> population;
  double influenced_fraction = 0.10;
  int n_trials = 5;
  int period_start_s = 7 * 3600;
  int period_end_s = 10 * 3600;
  double background_volume = 0;  // per drive link
  ForestModel forest;
  AdoptionModel adoption;
  FuelModel fuel;
  double delay_alpha = 0.15;
  double delay_beta = 4.0;
  double default_capacity_vph = 1800;
  std::optional<double> force_adoption;  // overrides adoption_prob when set
  RecommendOptions options;
};

struct TrialResult {
  double total_fuel_l = 0;
  double total_delay_hr = 0;
  std::map<std::string, int> influenced_mode_counts;
  int influenced = 0;
  int adopted = 0;
};

nlohmann::json trial_to_json(const TrialResult& trial);

// Travelers influenced in the influence condition: the ceil(fraction * N)
// travelers ranked lowest by a hash of (scenario seed, traveler seed).
// Membership is a property of the traveler, stable across trials,
// conditions, and processing order.
std::vector<bool> influenced_members(const Scenario& scenario);

TrialResult run_trial(const Scenario& scenario, Condition condition,
                      int trial_index);

struct WelchInterval {
  double diff = 0;  // mean(a) - mean(b)
  double lo = 0;
  double hi = 0;
};

// 95% Welch (unequal variance) t-interval for the difference of means.
WelchInterval welch_ci95(const std::vector<double>& a,
                         const std::vector<double>& b);

struct MetricSummary {
  double baseline_mean = 0;
  double influence_mean = 0;
  double pct_change = 0;  // negative = reduction
  WelchInterval reduction_ci;  // baseline - influence
};

struct SimReport {
  std::uint64_t seed = 0;
  int n_trials = 0;
  double influenced_fraction = 0;
  std::vector<TrialResult> baseline_trials;
  std::vector<TrialResult> influence_trials;
  MetricSummary fuel;
  MetricSummary delay;
  std::map<std::string, double> mode_share_pct;  // influenced travelers
};

// Runs n_trials per condition with per-trial derived seeds and aggregates.
// Throws InsufficientTrials when n_trials < 2.
SimReport run_experiment(const Scenario& scenario);

nlohmann::json report_to_json(const SimReport& report);
std::string render_report_table(const nlohmann::json& report);
std::string render_report_csv(const nlohmann::json& report);

// scenario.json loader; unknown keys are rejected. See README for the
// schema. `base_dir` anchors relative paths in the file.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir);

}  // namespace copter
