#include "copter/energy.hpp"

#include <algorithm>
#include <cmath>

#include "copter/errors.hpp"

namespace copter {

double FuelModel::rate_l_per_km(double speed_mps) const {
  const double rate = a0 + a1 * speed_mps + a2 * speed_mps * speed_mps;
  return std::max(rate, 0.0);
}

double step_fuel(const FuelModel& model, Mode mode, double length_m,
                 double speed_mps) {
  if (speed_mps <= 0) throw InvariantViolation("fuel: speed must be > 0");
  const double length_km = length_m / 1000.0;
  switch (category_of(mode)) {
    case ModeCategory::NonMotorized:
      return 0.0;
    case ModeCategory::PublicTransit:
      if (mode == Mode::Subway) return 0.0;  // charged zero fuel-liters
      return model.rate_l_per_km(speed_mps) * length_km *
             model.bus_per_passenger_factor;
    case ModeCategory::Motorized:
      return model.rate_l_per_km(speed_mps) * length_km;
  }
  return 0.0;
}

double edge_fuel(const FuelModel& model, const Edge& edge, double speed_mps) {
  return step_fuel(model, edge.mode, edge.length_m, speed_mps);
}

double plan_energy(const FuelModel& model, const Plan& plan,
                   std::span<const double> speeds_mps) {
  if (!speeds_mps.empty() && speeds_mps.size() != plan.steps.size()) {
    throw LengthMismatch("speed override must have one entry per step");
  }
  double total = 0;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    const double speed = speeds_mps.empty()
                             ? step.distance_m / step.duration_s
                             : speeds_mps[i];
    total += step_fuel(model, step.mode, step.distance_m, speed);
  }
  return total;
}

double energy_saving(const FuelModel& model, const Plan& baseline,
                     const Plan& alternative) {
  return plan_energy(model, baseline) - plan_energy(model, alternative);
}

double link_delay(const VolumeDelay& vd, double volume) {
  if (volume < 0) throw InvariantViolation("delay: volume must be >= 0");
  if (volume == 0) return 0.0;
  return vd.t0_s * vd.alpha * std::pow(volume / vd.capacity_vph, vd.beta);
}

double congested_time_s(const VolumeDelay& vd, double volume) {
  return vd.t0_s + link_delay(vd, volume);
}

}  // namespace copter
