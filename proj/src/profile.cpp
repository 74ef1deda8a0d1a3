#include "copter/profile.hpp"

#include "copter/errors.hpp"

namespace copter {

std::vector<double> TravelerProfile::features() const {
  return {trip_distance_m,
          static_cast<double>(education_level),
          static_cast<double>(household_size),
          static_cast<double>(students),
          static_cast<double>(workers),
          hours_per_week,
          static_cast<double>(income_bracket),
          static_cast<double>(n_jobs),
          static_cast<double>(work_flexibility),
          static_cast<double>(n_autos),
          static_cast<double>(n_bicycles),
          static_cast<double>(has_license),
          static_cast<double>(has_transit_pass),
          static_cast<double>(transit_trips_last_week),
          static_cast<double>(bike_trips_last_week),
          static_cast<double>(walk_trips_last_week)};
}

void TravelerProfile::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw InvariantViolation(std::string("profile: ") + what);
  };
  check(trip_distance_m > 0, "trip_distance_m must be > 0");
  check(education_level >= 0 && education_level <= 8,
        "education_level out of range [0, 8]");
  check(household_size >= 1, "household_size must be >= 1");
  check(students >= 0, "students must be >= 0");
  check(workers >= 0, "workers must be >= 0");
  check(hours_per_week >= 0, "hours_per_week must be >= 0");
  check(income_bracket >= 0 && income_bracket <= 9,
        "income_bracket out of range [0, 9]");
  check(n_jobs >= 0, "n_jobs must be >= 0");
  check(work_flexibility >= 0 && work_flexibility <= 3,
        "work_flexibility out of range [0, 3]");
  check(n_autos >= 0, "n_autos must be >= 0");
  check(n_bicycles >= 0, "n_bicycles must be >= 0");
  check(has_license == 0 || has_license == 1, "has_license must be 0/1");
  check(has_transit_pass == 0 || has_transit_pass == 1,
        "has_transit_pass must be 0/1");
  check(transit_trips_last_week >= 0, "transit_trips_last_week must be >= 0");
  check(bike_trips_last_week >= 0, "bike_trips_last_week must be >= 0");
  check(walk_trips_last_week >= 0, "walk_trips_last_week must be >= 0");
}

TravelerProfile profile_from_values(
    const std::vector<std::pair<std::string, double>>& values,
    Mode usual_mode) {
  TravelerProfile p;
  p.usual_mode = usual_mode;
  for (const auto& [name, v] : values) {
    if (name == "trip_distance_m") p.trip_distance_m = v;
    else if (name == "education_level") p.education_level = static_cast<int>(v);
    else if (name == "household_size") p.household_size = static_cast<int>(v);
    else if (name == "students") p.students = static_cast<int>(v);
    else if (name == "workers") p.workers = static_cast<int>(v);
    else if (name == "hours_per_week") p.hours_per_week = v;
    else if (name == "income_bracket") p.income_bracket = static_cast<int>(v);
    else if (name == "n_jobs") p.n_jobs = static_cast<int>(v);
    else if (name == "work_flexibility") p.work_flexibility = static_cast<int>(v);
    else if (name == "n_autos") p.n_autos = static_cast<int>(v);
    else if (name == "n_bicycles") p.n_bicycles = static_cast<int>(v);
    else if (name == "has_license") p.has_license = static_cast<int>(v);
    else if (name == "has_transit_pass") p.has_transit_pass = static_cast<int>(v);
    else if (name == "transit_trips_last_week")
      p.transit_trips_last_week = static_cast<int>(v);
    else if (name == "bike_trips_last_week")
      p.bike_trips_last_week = static_cast<int>(v);
    else if (name == "walk_trips_last_week")
      p.walk_trips_last_week = static_cast<int>(v);
    else
      throw SchemaMismatch("unknown profile field '" + name + "'");
  }
  return p;
}

}  // namespace copter
