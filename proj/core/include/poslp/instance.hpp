#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace poslp {

// One nonzero inside a row: (column index, coefficient > 0).
struct RowEntry {
  std::int32_t column = 0;
  double coef = 0.0;
};

struct SparseRow {
  double rhs = 0.0;
  std::vector<RowEntry> entries;  // sorted by ascending column index
};

// One nonzero inside a column: (row index, coefficient > 0).
struct ColumnEntry {
  std::int32_t row = 0;
  double coef = 0.0;
};

// Sparse nonnegative constraint system with both row-major storage and a
// per-column index.  Within each column, entries are sorted by decreasing
// coefficient (ties broken by ascending row index), which is what the
// deactivation-aware column maxima rely on.
struct SparseConstraintSystem {
  std::int32_t n = 0;
  std::vector<SparseRow> rows;
  std::vector<std::vector<ColumnEntry>> columns;

  std::int32_t row_count() const { return static_cast<std::int32_t>(rows.size()); }
  std::size_t nonzero_count() const;

  // Rebuilds `columns` from `rows`.
  void build_column_index();
};

// What normalization removed or pinned, kept with the instance so that
// solution checking can enforce the original semantics.
struct NormalizeLog {
  std::vector<std::int32_t> fixed_columns;         // forced to 0 by rhs-0 packing rows
  std::vector<std::int32_t> dropped_packing_rows;  // original indices of rhs-0 rows
  std::vector<std::int32_t> dropped_covering_rows; // vacuous rows (rhs <= 0)
};

// Mixed packing/covering instance: find x >= 0 with covering*x >= rhs and
// packing*x <= rhs.  Solvers require the normalized (unit-rhs) form.
struct MixedInstance {
  std::int32_t n = 0;
  SparseConstraintSystem packing;
  SparseConstraintSystem covering;
  bool normalized = false;
  NormalizeLog norm_log;

  std::int32_t packing_rows() const { return packing.row_count(); }
  std::int32_t covering_rows() const { return covering.row_count(); }
  std::size_t nonzero_count() const {
    return packing.nonzero_count() + covering.nonzero_count();
  }
};

// Pure covering instance: minimize costs . x subject to system*x >= rhs, x >= 0.
struct CoveringInstance {
  SparseConstraintSystem system;
  std::vector<double> costs;  // one nonnegative cost per column
  bool normalized = false;
  NormalizeLog norm_log;

  std::int32_t n() const { return system.n; }
  std::int32_t rows() const { return system.row_count(); }
};

struct FacilityPair {
  std::int32_t client = 0;
  std::int32_t facility = 0;
  double cost = 0.0;
};

// Facility location: open costs per facility, assignment costs per finite
// (client, facility) pair.  Only finite pairs are materialized; per-client
// adjacency is presorted by ascending assignment cost.
struct FacilityInstance {
  std::int32_t n_facilities = 0;
  std::int32_t m_clients = 0;
  std::vector<double> open_cost;
  std::vector<FacilityPair> pairs;

  // pair ids per client, sorted ascending by cost (ties: facility id);
  // pair ids per facility in client order.
  std::vector<std::vector<std::int32_t>> client_pairs;
  std::vector<std::vector<std::int32_t>> facility_pairs;

  std::size_t pair_count() const { return pairs.size(); }
  void build_adjacency();
};

struct ValidationResult {
  bool ok = true;
  bool infeasible = false;          // provably infeasible at validation time
  std::int32_t offending_row = -1;  // for infeasible covering rows
  std::string message;
};

// Divides every row by its rhs.  Packing rows with rhs = 0 pin their support
// columns to zero (entries removed everywhere, recorded in the log); covering
// rows with rhs <= 0 are vacuous and dropped.  Idempotent.
NormalizeLog normalize(MixedInstance& inst);
NormalizeLog normalize(CoveringInstance& inst);

ValidationResult validate(const MixedInstance& inst);
ValidationResult validate(const CoveringInstance& inst);
ValidationResult validate(const FacilityInstance& inst);

// eps must lie in (0, 1/10]; throws std::invalid_argument otherwise.
void require_epsilon(double eps);

}  // namespace poslp
