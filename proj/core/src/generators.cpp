#include "poslp/generators.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <span>
#include <stdexcept>

namespace poslp {

namespace {

// k distinct column indices; the first one can be pinned to guarantee that
// every column ends up with support somewhere.
std::vector<std::int32_t> pick_support(DeterministicRng& rng, std::int32_t n, std::int32_t k,
                                       std::int32_t pinned) {
  std::set<std::int32_t> cols;
  if (pinned >= 0) cols.insert(pinned);
  while (static_cast<std::int32_t>(cols.size()) < k) {
    cols.insert(static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(n))));
  }
  return {cols.begin(), cols.end()};
}

SparseRow make_row(DeterministicRng& rng, std::int32_t n, std::int32_t k, std::int32_t pinned,
                   std::span<const double> x_star, bool covering) {
  SparseRow row;
  for (std::int32_t col : pick_support(rng, n, k, pinned)) {
    row.entries.push_back({col, rng.next_double(0.1, 2.0)});
  }
  double value = 0.0;
  for (const auto& e : row.entries) value += e.coef * x_star[static_cast<std::size_t>(e.column)];
  // Covering rows keep rhs <= value (so x* covers them after scaling);
  // packing rows keep rhs >= value.
  row.rhs = covering ? value * rng.next_double(0.5, 1.0) : value * rng.next_double(1.0, 2.0);
  return row;
}

}  // namespace

MpcGenResult generate_mpc(const MpcGenSpec& spec) {
  if (spec.n <= 0 || spec.covering_rows <= 0 || spec.packing_rows < 0 || spec.row_nnz <= 0) {
    throw std::invalid_argument("inconsistent mpc generator spec");
  }
  const std::int32_t k = std::min(spec.row_nnz, spec.n);
  DeterministicRng rng(spec.seed);

  MpcGenResult out;
  out.instance.n = spec.n;
  out.x_star.resize(static_cast<std::size_t>(spec.n));
  for (auto& v : out.x_star) v = rng.next_double(0.5, 1.5);

  for (std::int32_t i = 0; i < spec.covering_rows; ++i) {
    out.instance.covering.rows.push_back(make_row(rng, spec.n, k, -1, out.x_star, true));
  }
  // Columns the random supports missed get appended to covering rows, so
  // every variable has a nonzero somewhere (appending only raises the row
  // value, which keeps the planted witness covering).
  {
    std::vector<bool> seen(static_cast<std::size_t>(spec.n), false);
    for (const auto& row : out.instance.covering.rows) {
      for (const auto& e : row.entries) seen[static_cast<std::size_t>(e.column)] = true;
    }
    std::int32_t r = 0;
    for (std::int32_t j = 0; j < spec.n; ++j) {
      if (seen[static_cast<std::size_t>(j)]) continue;
      auto& row = out.instance.covering.rows[static_cast<std::size_t>(r)];
      row.entries.push_back({j, rng.next_double(0.1, 2.0)});
      r = (r + 1) % spec.covering_rows;
    }
    // Re-derive rhs for rows that changed, then sort all rows' entries.
    for (auto& row : out.instance.covering.rows) {
      std::sort(row.entries.begin(), row.entries.end(),
                [](const RowEntry& a, const RowEntry& b) { return a.column < b.column; });
      double value = 0.0;
      for (const auto& e : row.entries) value += e.coef * out.x_star[static_cast<std::size_t>(e.column)];
      if (row.rhs > value) row.rhs = value;  // keep the planted witness covering
    }
  }
  for (std::int32_t i = 0; i < spec.packing_rows; ++i) {
    auto row = make_row(rng, spec.n, k, -1, out.x_star, false);
    std::sort(row.entries.begin(), row.entries.end(),
              [](const RowEntry& a, const RowEntry& b) { return a.column < b.column; });
    out.instance.packing.rows.push_back(std::move(row));
  }

  if (spec.planted_infeasible) {
    const std::size_t pick = rng.next_below(out.instance.covering.rows.size());
    SparseRow dup = out.instance.covering.rows[pick];
    dup.rhs *= 0.5;
    out.instance.packing.rows.push_back(std::move(dup));
  }

  out.instance.packing.n = spec.n;
  out.instance.covering.n = spec.n;
  out.instance.packing.build_column_index();
  out.instance.covering.build_column_index();

  // The planted witness must survive normalization.
  if (!spec.planted_infeasible) {
    for (const auto& row : out.instance.covering.rows) {
      double v = 0.0;
      for (const auto& e : row.entries) v += e.coef * out.x_star[static_cast<std::size_t>(e.column)];
      assert(v >= row.rhs);
      (void)v;
    }
    for (const auto& row : out.instance.packing.rows) {
      double v = 0.0;
      for (const auto& e : row.entries) v += e.coef * out.x_star[static_cast<std::size_t>(e.column)];
      assert(v <= row.rhs);
      (void)v;
    }
  }
  return out;
}

CoveringInstance generate_cover(const CoverGenSpec& spec) {
  if (spec.elements <= 0 || spec.sets <= 0 || spec.row_nnz <= 0) {
    throw std::invalid_argument("inconsistent cover generator spec");
  }
  DeterministicRng rng(spec.seed);
  CoveringInstance inst;
  inst.system.n = spec.sets;
  inst.costs.resize(static_cast<std::size_t>(spec.sets));
  for (auto& w : inst.costs) w = rng.next_double(spec.cost_lo, spec.cost_hi);
  const std::int32_t k = std::min(spec.row_nnz, spec.sets);
  for (std::int32_t i = 0; i < spec.elements; ++i) {
    SparseRow row;
    row.rhs = 1.0;
    for (std::int32_t col : pick_support(rng, spec.sets, k, -1)) {
      row.entries.push_back({col, rng.next_double(spec.coef_lo, spec.coef_hi)});
    }
    inst.system.rows.push_back(std::move(row));
  }
  inst.system.build_column_index();
  return inst;
}

FacilityInstance generate_fl(const FlGenSpec& spec) {
  if (spec.clients <= 0 || spec.facilities <= 0 || spec.pair_count < spec.clients ||
      spec.pair_count > spec.clients * spec.facilities) {
    throw std::invalid_argument("inconsistent fl generator spec");
  }
  DeterministicRng rng(spec.seed);
  FacilityInstance inst;
  inst.m_clients = spec.clients;
  inst.n_facilities = spec.facilities;
  inst.open_cost.resize(static_cast<std::size_t>(spec.facilities));
  for (auto& f : inst.open_cost) f = rng.next_double(spec.open_lo, spec.open_hi);

  std::set<std::pair<std::int32_t, std::int32_t>> chosen;
  for (std::int32_t i = 0; i < spec.clients; ++i) {
    chosen.insert({i, static_cast<std::int32_t>(rng.next_below(
                          static_cast<std::uint64_t>(spec.facilities)))});
  }
  while (static_cast<std::int32_t>(chosen.size()) < spec.pair_count) {
    chosen.insert({static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(spec.clients))),
                   static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(spec.facilities)))});
  }
  for (const auto& [i, j] : chosen) {
    inst.pairs.push_back({i, j, rng.next_double(spec.assign_lo, spec.assign_hi)});
  }
  inst.build_adjacency();
  return inst;
}

MpcGenSpec mpc_spec_for_nnz(std::int64_t target_nnz, std::uint64_t seed, std::int32_t row_nnz) {
  MpcGenSpec spec;
  spec.row_nnz = row_nnz;
  const std::int64_t rows_per_side = std::max<std::int64_t>(2, target_nnz / (2 * row_nnz));
  spec.packing_rows = static_cast<std::int32_t>(rows_per_side);
  spec.covering_rows = static_cast<std::int32_t>(rows_per_side);
  spec.n = static_cast<std::int32_t>(std::max<std::int64_t>(4, rows_per_side));
  spec.seed = seed;
  return spec;
}

}  // namespace poslp
