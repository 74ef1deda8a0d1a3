#pragma once

#include <span>

#include "copter/netgraph.hpp"
#include "copter/planner.hpp"

namespace copter {

// Stand-in mesoscopic fuel model: a quadratic per-distance fuel rate for
// motorized modes, an amortized per-passenger share for bus riders, and
// zero for walking, cycling and subway. Coefficients are configuration
// values; the defaults are plausibility-scaled, not calibrated.
struct FuelModel {
  double a0 = 0.10;      // l/km at v = 0
  double a1 = -0.003;    // l/km per (m/s)
  double a2 = 0.00006;   // l/km per (m/s)^2
  double bus_per_passenger_factor = 0.05;

  // a0 + a1*v + a2*v^2, clamped at zero.
  double rate_l_per_km(double speed_mps) const;
};

// Fuel in liters for one traversal of the edge at the given speed.
double edge_fuel(const FuelModel& model, const Edge& edge, double speed_mps);
double step_fuel(const FuelModel& model, Mode mode, double length_m,
                 double speed_mps);

// Sum of per-step fuel. `speeds_mps` overrides the per-step speed (one entry
// per step); when empty, each step uses distance / duration.
double plan_energy(const FuelModel& model, const Plan& plan,
                   std::span<const double> speeds_mps = {});

// plan_energy(baseline) - plan_energy(alternative); negative when the
// alternative burns more.
double energy_saving(const FuelModel& model, const Plan& baseline,
                     const Plan& alternative);

// BPR-style volume-delay relation for one link.
struct VolumeDelay {
  double alpha = 0.15;
  double beta = 4.0;
  double capacity_vph = 1800;
  double t0_s = 0;  // free-flow traversal time
};

// Excess over free flow in seconds for one traversal: t0 * alpha *
// (volume/capacity)^beta. Zero at zero volume.
double link_delay(const VolumeDelay& vd, double volume);

// Congested traversal time t0 * (1 + alpha * (v/c)^beta).
double congested_time_s(const VolumeDelay& vd, double volume);

}  // namespace copter
