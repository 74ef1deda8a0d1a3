#pragma once

#include <array>
#include <string>
#include <vector>

#include "copter/modes.hpp"

namespace copter {

// Travel-survey traveler features. Ordinal encodings:
//   education_level:  0 = no schooling .. 8 = doctorate
//   income_bracket:   0 = lowest bracket .. 9 = highest
//   work_flexibility: 0 = none, 1 = some, 2 = flexible, 3 = fully flexible
// Missing values are NaN in the feature vector; model training imputes them
// with stored medians.
struct TravelerProfile {
  double trip_distance_m = 0;

  // demographics
  int education_level = 0;
  int household_size = 1;
  int students = 0;
  int workers = 0;

  // employment
  double hours_per_week = 0;
  int income_bracket = 0;
  int n_jobs = 0;
  int work_flexibility = 0;

  // mode accessibility
  int n_autos = 0;
  int n_bicycles = 0;
  int has_license = 0;      // 0/1
  int has_transit_pass = 0; // 0/1

  // mode experience (trips in the past week)
  int transit_trips_last_week = 0;
  int bike_trips_last_week = 0;
  int walk_trips_last_week = 0;

  Mode usual_mode = Mode::Drive;

  bool owns_bicycle() const { return n_bicycles > 0; }

  // Feature vector in kProfileFeatureNames order.
  std::vector<double> features() const;

  // Throws InvariantViolation when a field is out of its declared range.
  void validate() const;
};

inline constexpr std::array<const char*, 16> kProfileFeatureNames = {
    "trip_distance_m",
    "education_level",
    "household_size",
    "students",
    "workers",
    "hours_per_week",
    "income_bracket",
    "n_jobs",
    "work_flexibility",
    "n_autos",
    "n_bicycles",
    "has_license",
    "has_transit_pass",
    "transit_trips_last_week",
    "bike_trips_last_week",
    "walk_trips_last_week",
};

// Builds a profile from named values (CSV row or JSON object); unspecified
// fields keep their defaults. Throws SchemaMismatch on unknown names.
TravelerProfile profile_from_values(
    const std::vector<std::pair<std::string, double>>& values,
    Mode usual_mode = Mode::Drive);

}  // namespace copter
