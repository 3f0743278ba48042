#pragma once

#include <cstdint>

namespace lattice {

enum class ScheduleMode { decaying, fixed };

/// Step sizes delta_t = base_step * (1 + t)^(-decay_exponent), or a constant
/// base_step in fixed mode.
struct StepSchedule {
  double base_step = 1e-3;
  double decay_exponent = 0.55;
  ScheduleMode mode = ScheduleMode::decaying;

  /// Throws InvalidArgument unless base_step > 0 and finite. Decaying mode
  /// also requires decay_exponent > 0 so the sequence strictly decreases.
  void validate() const;
};

double schedule_step_size(const StepSchedule& schedule, std::uint64_t t);

}  // namespace lattice
