#include "copter/synthetic.hpp"

#include <cmath>

#include "copter/csv.hpp"
#include "copter/errors.hpp"
#include "copter/rng.hpp"

namespace copter {

namespace {

Mode rule_label(double distance_m, int n_autos) {
  if (n_autos == 0) {
    if (distance_m < 1500) return Mode::Walk;
    if (distance_m < 6000) return Mode::Bus;
    return Mode::Subway;
  }
  if (n_autos == 1) {
    return distance_m < 1000 ? Mode::Walk : Mode::Drive;
  }
  return distance_m < 600 ? Mode::Walk : Mode::Drive;
}

}  // namespace

Dataset synthetic_trips(const SyntheticTripsSpec& spec, std::uint64_t seed) {
  if (spec.n <= 0) throw EmptyDataset("synthetic trips: n must be > 0");
  Rng rng(seed);
  Dataset data;
  data.feature_names.assign(kProfileFeatureNames.begin(),
                            kProfileFeatureNames.end());
  data.labels = mode_labels();

  for (int i = 0; i < spec.n; ++i) {
    TravelerProfile p;
    p.trip_distance_m = std::floor(rng.uniform(200.0, 20000.0));
    p.education_level = static_cast<int>(rng.uniform_int(0, 8));
    p.household_size = static_cast<int>(rng.uniform_int(1, 6));
    p.students = static_cast<int>(rng.uniform_int(0, p.household_size - 1));
    p.workers = static_cast<int>(rng.uniform_int(0, p.household_size));
    p.hours_per_week = std::floor(rng.uniform(0.0, 60.0));
    p.income_bracket = static_cast<int>(rng.uniform_int(0, 9));
    p.n_jobs = static_cast<int>(rng.uniform_int(0, 2));
    p.work_flexibility = static_cast<int>(rng.uniform_int(0, 3));
    p.n_autos = static_cast<int>(rng.uniform_int(0, 3));
    p.n_bicycles = static_cast<int>(rng.uniform_int(0, 2));
    p.has_license = p.n_autos > 0 ? 1 : static_cast<int>(rng.uniform_int(0, 1));
    p.has_transit_pass = static_cast<int>(rng.uniform_int(0, 1));
    p.transit_trips_last_week = static_cast<int>(rng.uniform_int(0, 10));
    p.bike_trips_last_week = static_cast<int>(rng.uniform_int(0, 7));
    p.walk_trips_last_week = static_cast<int>(rng.uniform_int(0, 14));

    Mode label = rule_label(p.trip_distance_m, p.n_autos);
    if (rng.uniform() < spec.label_noise) {
      label = kAllModes[rng.index(kNumModes)];
    }
    data.rows.push_back(p.features());
    data.targets.push_back(static_cast<int>(label));
  }
  return data;
}

void write_trips_csv(const Dataset& data, const std::filesystem::path& path) {
  std::vector<std::string> header = data.feature_names;
  header.push_back("label");
  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    std::vector<std::string> row;
    row.reserve(header.size());
    for (double v : data.rows[i]) {
      row.push_back(std::isnan(v) ? "" : format_double(v));
    }
    row.push_back(data.labels[data.targets[i]]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

}  // namespace copter
