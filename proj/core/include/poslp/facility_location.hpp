#pragma once

#include <functional>
#include <span>
#include <vector>

#include "poslp/extended_scalar.hpp"
#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

struct FlOptions {
  double epsilon = 0.1;
  int threads = 1;
  bool verify_topup = false;  // check the top-up postcondition after each call
  double scaling_cap_factor = 10.0;
};

struct FlEvent {
  enum class Kind { Increment, Scaling, TopUp };
  Kind kind = Kind::Increment;
  std::int32_t facility = -1;  // sequential increments only
  double z = 0.0;
  double u = 0.0;
  ExtendedScalar lambda0;
  std::span<const double> x_pairs;
  std::span<const double> y;
  std::span<const double> coverage;  // A_i x per client
  std::span<const std::uint8_t> client_active;
  std::span<const std::uint8_t> in_active_set;  // parallel: J membership per facility
  double best_lower_bound = 0.0;
};

struct FlHooks {
  std::function<void(const FlEvent&)> on_increment;
  std::function<void(const FlEvent&)> on_scaling;
  std::function<void(const FlEvent&)> on_topup;
};

// Canonical star of a facility at a price threshold: the adjacent clients
// whose assignment cost is strictly below threshold * a_i(x).  By the
// canonical-star property, lambda(x, j, S_j) <= threshold holds iff some
// star of j reaches the threshold, so solvers never enumerate subsets.
struct Star {
  std::vector<std::int32_t> pair_ids;
  double cost_sum = 0.0;        // f_j + sum of member assignment costs
  ExtendedScalar credit_sum;    // sum of member a_i; empty star <=> zero
  ExtendedScalar lambda;        // meaningful only when credit_sum is nonzero
};
Star best_star(const FacilityInstance& inst, std::int32_t facility,
               const ExtendedScalar& threshold, std::span<const ExtendedScalar> a);

// Raises x_ij toward y_j for every sufficiently cheap pair of each client,
// per the prefix-sum procedure; afterwards c_ij < lambda0 * a_i(x) implies
// x_ij = y_j.  Coverage and credits are updated in place.  Each client is
// independent; `pairs_touched` (when given) accumulates work.
void top_up(const FacilityInstance& inst, const ExtendedScalar& lambda0, double eps, double u,
            std::span<double> x_pairs, std::span<const double> y, std::span<double> coverage,
            std::span<ExtendedScalar> a, std::span<std::uint8_t> client_active,
            std::int32_t* active_clients, std::uint64_t* pairs_touched = nullptr);

// Number of pairs with c_ij < lambda0 * a_i(x) but x_ij < y_j beyond
// tolerance; zero after a correct top_up.
std::uint64_t count_topup_violations(const FacilityInstance& inst, const ExtendedScalar& lambda0,
                                     std::span<const double> x_pairs, std::span<const double> y,
                                     std::span<const ExtendedScalar> a);

SolveReport solve_fl_sequential(const FacilityInstance& inst, const FlOptions& options,
                                const FlHooks* hooks = nullptr);
SolveReport solve_fl_parallel(const FacilityInstance& inst, const FlOptions& options,
                              const FlHooks* hooks = nullptr);

// Explicit set-cover expansion (one column per facility and nonempty subset
// of its adjacent clients); small-instance test oracle only.
struct StarLabel {
  std::int32_t facility = 0;
  std::uint32_t member_mask = 0;  // bit per client id
};
CoveringInstance hochbaum_expand(const FacilityInstance& inst, std::vector<StarLabel>* labels);

// Maps a solution of the expansion back: x_ij = sum over stars containing i,
// y_j = max_i x_ij.
void hochbaum_lift(const FacilityInstance& inst, std::span<const StarLabel> labels,
                   std::span<const double> star_values, std::vector<double>& x_pairs,
                   std::vector<double>& y);

// |a(x)| * lambda*(x) with lambda* minimized exactly over all stars (prefix
// scan in c_ij / a_i order per facility), recomputed from a raw iterate.
double fl_dual_bound(const FacilityInstance& inst, std::span<const double> x_pairs_raw,
                     double eps, double u, ExtendedScalar* lambda_star = nullptr);

}  // namespace poslp
