#include "poslp/instance.hpp"

#include <algorithm>
#include <stdexcept>

namespace poslp {

std::size_t SparseConstraintSystem::nonzero_count() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.entries.size();
  return total;
}

void SparseConstraintSystem::build_column_index() {
  columns.assign(static_cast<std::size_t>(n), {});
  for (std::int32_t i = 0; i < row_count(); ++i) {
    for (const auto& e : rows[static_cast<std::size_t>(i)].entries) {
      columns[static_cast<std::size_t>(e.column)].push_back({i, e.coef});
    }
  }
  for (auto& col : columns) {
    std::stable_sort(col.begin(), col.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
      if (a.coef != b.coef) return a.coef > b.coef;
      return a.row < b.row;
    });
  }
}

namespace {

void scale_rows_to_unit(SparseConstraintSystem& sys) {
  for (auto& row : sys.rows) {
    if (row.rhs == 1.0) continue;
    const double inv = 1.0 / row.rhs;
    for (auto& e : row.entries) e.coef *= inv;
    row.rhs = 1.0;
  }
}

void remove_columns(SparseConstraintSystem& sys, const std::vector<bool>& fixed) {
  for (auto& row : sys.rows) {
    std::erase_if(row.entries,
                  [&](const RowEntry& e) { return fixed[static_cast<std::size_t>(e.column)]; });
  }
}

}  // namespace

NormalizeLog normalize(MixedInstance& inst) {
  NormalizeLog log;
  if (inst.normalized) return log;

  // Packing rows with rhs = 0 force their support to zero.
  std::vector<bool> fixed(static_cast<std::size_t>(inst.n), false);
  for (std::int32_t i = 0; i < inst.packing.row_count(); ++i) {
    const auto& row = inst.packing.rows[static_cast<std::size_t>(i)];
    if (row.rhs == 0.0) {
      log.dropped_packing_rows.push_back(i);
      for (const auto& e : row.entries) fixed[static_cast<std::size_t>(e.column)] = true;
    }
  }
  for (std::int32_t j = 0; j < inst.n; ++j) {
    if (fixed[static_cast<std::size_t>(j)]) log.fixed_columns.push_back(j);
  }
  if (!log.fixed_columns.empty()) {
    remove_columns(inst.packing, fixed);
    remove_columns(inst.covering, fixed);
  }
  std::erase_if(inst.packing.rows, [](const SparseRow& r) { return r.rhs == 0.0; });

  // Vacuous covering rows.
  for (std::int32_t i = 0; i < inst.covering.row_count(); ++i) {
    if (inst.covering.rows[static_cast<std::size_t>(i)].rhs <= 0.0) {
      log.dropped_covering_rows.push_back(i);
    }
  }
  std::erase_if(inst.covering.rows, [](const SparseRow& r) { return r.rhs <= 0.0; });

  scale_rows_to_unit(inst.packing);
  scale_rows_to_unit(inst.covering);
  inst.packing.n = inst.n;
  inst.covering.n = inst.n;
  inst.packing.build_column_index();
  inst.covering.build_column_index();
  inst.normalized = true;
  inst.norm_log = log;
  return log;
}

NormalizeLog normalize(CoveringInstance& inst) {
  NormalizeLog log;
  if (inst.normalized) return log;
  for (std::int32_t i = 0; i < inst.system.row_count(); ++i) {
    if (inst.system.rows[static_cast<std::size_t>(i)].rhs <= 0.0) {
      log.dropped_covering_rows.push_back(i);
    }
  }
  std::erase_if(inst.system.rows, [](const SparseRow& r) { return r.rhs <= 0.0; });
  scale_rows_to_unit(inst.system);
  inst.system.build_column_index();
  inst.normalized = true;
  inst.norm_log = log;
  return log;
}

namespace {

ValidationResult fail(std::string msg) {
  ValidationResult r;
  r.ok = false;
  r.message = std::move(msg);
  return r;
}

ValidationResult check_system(const SparseConstraintSystem& sys, std::int32_t n,
                              bool covering_side) {
  for (std::int32_t i = 0; i < sys.row_count(); ++i) {
    const auto& row = sys.rows[static_cast<std::size_t>(i)];
    std::int32_t prev = -1;
    for (const auto& e : row.entries) {
      if (e.column < 0 || e.column >= n) return fail("entry column out of range");
      if (e.column <= prev) return fail("row entries not strictly sorted by column");
      prev = e.column;
      if (!(e.coef > 0.0)) return fail("nonpositive coefficient");
    }
    if (covering_side && row.entries.empty()) {
      ValidationResult r;
      r.ok = false;
      r.infeasible = true;
      r.offending_row = i;
      r.message = "covering row " + std::to_string(i) + " has empty support";
      return r;
    }
  }
  return {};
}

}  // namespace

ValidationResult validate(const MixedInstance& inst) {
  if (!inst.normalized) return fail("instance must be normalized before solving");
  if (inst.packing_rows() + inst.covering_rows() <= 0) return fail("no constraints");
  if (auto r = check_system(inst.packing, inst.n, false); !r.ok) return r;
  if (auto r = check_system(inst.covering, inst.n, true); !r.ok) return r;
  return {};
}

ValidationResult validate(const CoveringInstance& inst) {
  if (!inst.normalized) return fail("instance must be normalized before solving");
  if (inst.rows() == 0) return fail("no covering rows");
  if (static_cast<std::int32_t>(inst.costs.size()) != inst.n()) {
    return fail("cost vector length mismatch");
  }
  for (double w : inst.costs) {
    if (!(w >= 0.0)) return fail("negative column cost");
  }
  return check_system(inst.system, inst.n(), true);
}

ValidationResult validate(const FacilityInstance& inst) {
  if (inst.m_clients <= 0 || inst.n_facilities <= 0) return fail("empty facility instance");
  if (static_cast<std::int32_t>(inst.open_cost.size()) != inst.n_facilities) {
    return fail("open cost vector length mismatch");
  }
  for (double f : inst.open_cost) {
    if (!(f >= 0.0)) return fail("negative open cost");
  }
  std::vector<bool> has_pair(static_cast<std::size_t>(inst.m_clients), false);
  for (const auto& p : inst.pairs) {
    if (p.client < 0 || p.client >= inst.m_clients) return fail("pair client out of range");
    if (p.facility < 0 || p.facility >= inst.n_facilities) return fail("pair facility out of range");
    if (!(p.cost >= 0.0)) return fail("negative assignment cost");
    has_pair[static_cast<std::size_t>(p.client)] = true;
  }
  for (std::int32_t i = 0; i < inst.m_clients; ++i) {
    if (!has_pair[static_cast<std::size_t>(i)]) {
      return fail("client " + std::to_string(i) + " has no finite pair");
    }
  }
  if (inst.client_pairs.size() != static_cast<std::size_t>(inst.m_clients) ||
      inst.facility_pairs.size() != static_cast<std::size_t>(inst.n_facilities)) {
    return fail("adjacency not built");
  }
  return {};
}

void FacilityInstance::build_adjacency() {
  client_pairs.assign(static_cast<std::size_t>(m_clients), {});
  facility_pairs.assign(static_cast<std::size_t>(n_facilities), {});
  for (std::int32_t k = 0; k < static_cast<std::int32_t>(pairs.size()); ++k) {
    const auto& p = pairs[static_cast<std::size_t>(k)];
    client_pairs[static_cast<std::size_t>(p.client)].push_back(k);
    facility_pairs[static_cast<std::size_t>(p.facility)].push_back(k);
  }
  for (auto& adj : client_pairs) {
    std::stable_sort(adj.begin(), adj.end(), [&](std::int32_t a, std::int32_t b) {
      const auto& pa = pairs[static_cast<std::size_t>(a)];
      const auto& pb = pairs[static_cast<std::size_t>(b)];
      if (pa.cost != pb.cost) return pa.cost < pb.cost;
      return pa.facility < pb.facility;
    });
  }
}

void require_epsilon(double eps) {
  if (!(eps > 0.0) || !(eps <= 0.1)) {
    throw std::invalid_argument("epsilon must lie in (0, 1/10], got " + std::to_string(eps));
  }
}

}  // namespace poslp
