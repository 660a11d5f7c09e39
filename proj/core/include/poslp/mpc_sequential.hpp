#pragma once

#include <functional>
#include <span>
#include <vector>

#include "poslp/extended_scalar.hpp"
#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

// Lag of one sampling group of the running column: top = 2^top_exp, and
// delta is the growth of x_j since the group's estimates were last pushed.
struct SequentialGroupDebug {
  std::int32_t top_exp = 0;
  double delta = 0.0;
};

struct SequentialEvent {
  enum class Kind { Increment, RunBoundary, Scaling };
  Kind kind = Kind::Increment;
  std::int32_t column = -1;
  double z = 0.0;
  double u = 0.0;
  ExtendedScalar lambda0;
  std::span<const double> x;
  std::span<const double> packing_estimates;   // P-hat
  std::span<const double> covering_estimates;  // C-hat
  std::span<const std::uint8_t> covering_active;
  std::span<const std::uint32_t> packing_update_counts;
  std::span<const std::uint32_t> covering_update_counts;
  std::span<const std::uint32_t> packing_run_touches;
  std::span<const std::uint32_t> covering_run_touches;
  ExtendedScalar column_pack_sum;   // incremental price sums of `column`
  ExtendedScalar column_cover_sum;
  // Filled for Increment events only: group lags of column `column`.
  std::vector<SequentialGroupDebug> packing_groups;
  std::vector<SequentialGroupDebug> covering_groups;
};

struct MpcSequentialHooks {
  std::function<void(const SequentialEvent&)> on_increment;
  std::function<void(const SequentialEvent&)> on_run_boundary;
  std::function<void(const SequentialEvent&)> on_scaling;
};

struct MpcOptionsSequential {
  double epsilon = 0.1;
  double scaling_cap_factor = 10.0;
};

// Nearly-linear-time mixed packing/covering solver.  Row-value estimates are
// maintained by deterministic periodic sampling over power-of-two coefficient
// groups; estimates are within (true - 1, true] at all times and exact at
// every run boundary.
SolveReport solve_sequential(const MixedInstance& inst, const MpcOptionsSequential& options,
                             const MpcSequentialHooks* hooks = nullptr);

}  // namespace poslp
