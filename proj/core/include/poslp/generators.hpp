#pragma once

#include <cstdint>
#include <vector>

#include "poslp/instance.hpp"

namespace poslp {

// splitmix64; kept here so generated instances are bit-identical across
// toolchains (std:: distributions are not portable).
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

struct MpcGenSpec {
  std::int32_t n = 0;
  std::int32_t packing_rows = 0;
  std::int32_t covering_rows = 0;
  std::int32_t row_nnz = 8;
  std::uint64_t seed = 0;
  bool planted_infeasible = false;
};

struct MpcGenResult {
  MixedInstance instance;       // raw (general rhs); callers normalize
  std::vector<double> x_star;   // planted witness; satisfies the normalized system
};

// Planted-feasible mixed instance: rhs values are drawn so that the planted
// x* satisfies Cx* >= 1 and Px* <= 1 after normalization (verified before
// returning).  With planted_infeasible, one covering row is duplicated as a
// packing row with half its rhs, which rules out every feasible point.
MpcGenResult generate_mpc(const MpcGenSpec& spec);

struct CoverGenSpec {
  std::int32_t elements = 0;  // rows
  std::int32_t sets = 0;      // columns
  std::int32_t row_nnz = 4;
  std::uint64_t seed = 0;
  double coef_lo = 0.5, coef_hi = 2.0;
  double cost_lo = 0.5, cost_hi = 2.0;
};
CoveringInstance generate_cover(const CoverGenSpec& spec);  // raw; callers normalize

struct FlGenSpec {
  std::int32_t clients = 0;
  std::int32_t facilities = 0;
  std::int32_t pair_count = 0;  // >= clients
  std::uint64_t seed = 0;
  double open_lo = 0.0, open_hi = 2.0;
  double assign_lo = 0.0, assign_hi = 2.0;
};
FacilityInstance generate_fl(const FlGenSpec& spec);

// Convenience shape used by the test corpus and the bench ladder: a planted
// mixed instance with ~target_nnz nonzeros split evenly between packing and
// covering rows of `row_nnz` entries each.
MpcGenSpec mpc_spec_for_nnz(std::int64_t target_nnz, std::uint64_t seed,
                            std::int32_t row_nnz = 8);

}  // namespace poslp
