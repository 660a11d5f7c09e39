#pragma once

#include <functional>
#include <span>
#include <vector>

#include "poslp/extended_scalar.hpp"
#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

struct MpcOptions {
  double epsilon = 0.1;
  std::vector<double> x0;            // empty = start from zero
  double scaling_cap_factor = 10.0;  // cap = factor * U lambda0-rescalings
};

// Instrumentation snapshot passed to hooks; spans point into live solver
// state and are only valid during the callback.
struct MpcEvent {
  std::int32_t column = -1;  // -1 for scaling events
  double z = 0.0;
  double u = 0.0;
  ExtendedScalar lambda0;
  ExtendedScalar lambda_j;  // incremental value for `column`
  ExtendedScalar p_total;
  ExtendedScalar c_total;
  std::span<const double> x;
  std::span<const double> packing_values;   // P_i x
  std::span<const double> covering_values;  // C_i x
  std::span<const std::uint8_t> covering_active;
};

struct MpcReferenceHooks {
  std::function<void(const MpcEvent&)> on_increment;  // after each x_j update
  std::function<void(const MpcEvent&)> on_scaling;    // before lambda0 scales
};

// Exact-bookkeeping implementation of the generic packing/covering scheme:
// single-coordinate increments chosen round-robin, lambda0 rescaled after
// each full sweep.  Serves as the correctness oracle for the faster solvers
// and carries the infeasibility certificate.
SolveReport solve_reference(const MixedInstance& inst, const MpcOptions& options,
                            const MpcReferenceHooks* hooks = nullptr);

}  // namespace poslp
