#pragma once

#include <functional>
#include <span>
#include <vector>

#include "poslp/extended_scalar.hpp"
#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

struct MpcOptionsParallel {
  double epsilon = 0.1;
  int threads = 1;
  double scaling_cap_factor = 10.0;
};

struct ParallelEvent {
  enum class Kind { Increment, PhaseEnd };
  Kind kind = Kind::Increment;
  std::uint64_t phase = 0;
  double z = 0.0;
  double u = 0.0;
  ExtendedScalar lambda0;
  std::span<const double> x;
  std::span<const double> packing_values;   // P_i x
  std::span<const double> covering_values;  // C_i x
  std::span<const std::uint8_t> covering_active;
  std::span<const std::uint8_t> in_active_set;           // J membership per column
  std::span<const std::uint32_t> column_increment_counts;  // increments with j in J
  std::size_t active_columns = 0;
};

struct MpcParallelHooks {
  std::function<void(const ParallelEvent&)> on_increment;
  std::function<void(const ParallelEvent&)> on_phase_end;
};

// Phase-based parallel solver: all sufficiently cheap columns receive a
// multiplicative increment at once, row values and column prices are updated
// incrementally over active edges, and each phase ends with a lambda0
// rescaling.  Output is bitwise identical for every thread count.
SolveReport solve_parallel(const MixedInstance& inst, const MpcOptionsParallel& options,
                           const MpcParallelHooks* hooks = nullptr);

}  // namespace poslp
