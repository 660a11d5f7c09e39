#pragma once

#include <span>
#include <string>

#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

// Feasibility checks against normalized instances.  `tolerance` slackens the
// covering side (min row value >= 1 - tolerance); `ratio_bound` caps the
// packing side (max row value <= 1 + ratio_bound).
FeasibilityReport check_solution(const MixedInstance& inst, std::span<const double> x,
                                 double tolerance, double ratio_bound);

FeasibilityReport check_solution(const CoveringInstance& inst, std::span<const double> x,
                                 double tolerance);

// x holds one value per finite pair, aligned with inst.pairs.
FeasibilityReport check_solution(const FacilityInstance& inst, std::span<const double> x,
                                 std::span<const double> y, double tolerance);

// Recomputes the certificate margins from scratch and confirms strict
// positivity of every column margin (plus consistency of the stored weights).
bool verify_infeasibility_certificate(const MixedInstance& inst,
                                      const InfeasibilityCertificate& cert,
                                      std::string* why = nullptr);

// Recomputes |a(x_snapshot)| * lambda*(x_snapshot) and confirms it is at
// least the claimed lower bound (up to 1e-9 relative slack).
bool verify_cover_bound(const CoveringInstance& inst, const BoundWitness& witness,
                        std::string* why = nullptr);
bool verify_fl_bound(const FacilityInstance& inst, const BoundWitness& witness,
                     std::string* why = nullptr);

}  // namespace poslp
