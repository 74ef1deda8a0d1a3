#pragma once

#include <cstdint>
#include <filesystem>

#include "copter/likelihood.hpp"

namespace copter {

// Synthetic travel-survey-shaped trip sampler for demos and evaluation. The mode
// label follows deterministic thresholds on trip distance and household
// autos, with a configurable fraction relabeled uniformly at random.
struct SyntheticTripsSpec {
  int n = 5000;
  double label_noise = 0.10;
};

Dataset synthetic_trips(const SyntheticTripsSpec& spec, std::uint64_t seed);

// Writes the dataset as a trips CSV (feature columns plus `label`).
void write_trips_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace copter
