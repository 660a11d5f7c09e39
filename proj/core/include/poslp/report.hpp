#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace poslp {

enum class SolveStatus { Solved, Infeasible, IterationCapExceeded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationCapExceeded: return "iteration_cap_exceeded";
  }
  return "?";
}

struct SolveCounters {
  std::uint64_t increments = 0;
  std::uint64_t scalings = 0;         // lambda0 rescalings; equals phase count
  std::uint64_t work_units = 0;       // nonzeros touched by arithmetic updates
  std::uint64_t estimate_updates = 0; // sequential mpc only
};

struct SolveDiagnostics {
  double u = 0.0;                          // coverage target used by the run
  std::uint64_t potential_violations = 0;  // report-only potential monitor
  std::uint64_t z_below_quarter_u = 0;     // parallel mpc: increments with z < 1/(4U)
  std::uint64_t topup_violations = 0;      // facility location: post-top-up check
  double min_step = std::numeric_limits<double>::infinity();
};

// Proof that no feasible point exists: with the stored weight vectors,
// every column has packing price strictly above covering credit, so any
// feasible x* would have to be identically zero.  A verifier recomputes the
// weights from x and the margins from scratch.
struct InfeasibilityCertificate {
  double epsilon = 0.0;
  double u = 0.0;
  std::vector<double> x;                 // raw iterate (not divided by U)
  std::vector<double> packing_weights;   // p(x)/|p(x)|
  std::vector<double> covering_weights;  // c(x)/|c(x)|
  std::vector<double> margins;           // per column, all > 0
};

// Lower-bound witness for covering and facility location: at the snapshot x,
// |a(x)| * lambda*(x) is a valid bound on the optimal cost.  lambda* is kept
// in mantissa/exponent form since it can leave the double range.
struct BoundWitness {
  double epsilon = 0.0;
  double u = 0.0;
  double lower_bound = 0.0;
  std::vector<double> x_snapshot;  // covering: per column; FL: per pair (raw scale)
  double lambda_star_mantissa = 0.0;
  std::int64_t lambda_star_exp2 = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::IterationCapExceeded;
  std::vector<double> x;  // mpc/covering: per column; FL: per finite pair
  std::vector<double> y;  // FL: per facility
  double cost = std::numeric_limits<double>::quiet_NaN();
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  std::optional<InfeasibilityCertificate> infeasibility;
  std::optional<BoundWitness> bound;
  SolveCounters counters;
  SolveDiagnostics diagnostics;
};

struct FeasibilityReport {
  bool pass = false;
  double min_covering = std::numeric_limits<double>::infinity();
  double max_packing = 0.0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

}  // namespace poslp
