#include "lattice/core/schedule.hpp"

#include <cmath>

#include "lattice/core/error.hpp"

namespace lattice {

void StepSchedule::validate() const {
  if (!(base_step > 0.0) || !std::isfinite(base_step)) {
    throw InvalidArgument("step schedule: base_step must be positive and finite");
  }
  if (mode == ScheduleMode::decaying && (!(decay_exponent > 0.0) || !std::isfinite(decay_exponent))) {
    throw InvalidArgument("step schedule: decaying mode needs a positive decay_exponent");
  }
}

double schedule_step_size(const StepSchedule& schedule, std::uint64_t t) {
  schedule.validate();
  if (schedule.mode == ScheduleMode::fixed) return schedule.base_step;
  return schedule.base_step * std::pow(1.0 + static_cast<double>(t), -schedule.decay_exponent);
}

}  // namespace lattice
