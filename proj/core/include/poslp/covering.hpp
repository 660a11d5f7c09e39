#pragma once

#include <functional>
#include <span>
#include <vector>

#include "poslp/extended_scalar.hpp"
#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

struct CoveringOptions {
  double epsilon = 0.1;
  std::vector<double> x0;
  double scaling_cap_factor = 10.0;
};

struct CoveringEvent {
  std::int32_t column = -1;  // -1 for scaling events
  double step = 0.0;
  double u = 0.0;
  ExtendedScalar lambda0;
  ExtendedScalar a_total;
  std::span<const double> x;
  std::span<const double> row_values;  // A_i x
  std::span<const std::uint8_t> row_active;
  double best_lower_bound = 0.0;
};

struct CoveringHooks {
  std::function<void(const CoveringEvent&)> on_increment;
  std::function<void(const CoveringEvent&)> on_scaling;
};

// Sequential pure-covering solver: price-guided unit-step increments with
// the running dual bound |a(x)| * lambda*(x) recorded as a certificate.
SolveReport solve_covering(const CoveringInstance& inst, const CoveringOptions& options,
                           const CoveringHooks* hooks = nullptr);

// |a(x)| * min_j w_j / (A_j^T a(x)) recomputed from scratch at the given
// iterate (raw scale, i.e. before division by U).  Returns 0 when every
// column is retired.  This is both the solver's bound and the witness
// verifier's recomputation path.
double covering_dual_bound(const CoveringInstance& inst, std::span<const double> x_raw,
                           double eps, double u, ExtendedScalar* lambda_star = nullptr);

}  // namespace poslp
