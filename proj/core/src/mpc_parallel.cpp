#include "poslp/mpc_parallel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "poslp/parallel_runtime.hpp"
#include "pc_internal.hpp"

namespace poslp {

namespace {

struct ParState {
  const MixedInstance* inst = nullptr;
  double eps = 0.0, u = 0.0, log2p = 0.0, log2c = 0.0;
  double max_px0 = 0.0;

  std::vector<double> x;
  std::vector<std::uint8_t> in_j;
  std::vector<std::uint8_t> retired;
  std::vector<double> px, cx;
  std::vector<ExtendedScalar> p, c;
  std::vector<std::uint8_t> active;
  std::atomic<std::int64_t> active_rows{0};

  // Covering columns with deactivated rows compacted away (packing columns
  // are used straight from the instance; packing rows never deactivate).
  std::vector<std::vector<ColumnEntry>> c_cols;

  // Per-phase scratch: candidate row increases and live id lists.
  std::vector<double> rp, rc;
  std::vector<std::int32_t> phase_cols, live_p_rows, live_c_rows;
  std::vector<std::vector<RowEntry>> p_rows_live, c_rows_live;

  std::vector<std::uint32_t> col_increments;

  ExtendedScalar lambda0;
  std::uint64_t phase = 0;
  std::atomic<std::uint64_t> work{0};
  SolveCounters counters;
  SolveDiagnostics diag;
};

void emit_event(const ParState& s, ParallelEvent::Kind kind, double z, std::size_t j_count,
                const std::function<void(const ParallelEvent&)>& fn) {
  ParallelEvent ev;
  ev.kind = kind;
  ev.phase = s.phase;
  ev.z = z;
  ev.u = s.u;
  ev.lambda0 = s.lambda0;
  ev.x = s.x;
  ev.packing_values = s.px;
  ev.covering_values = s.cx;
  ev.covering_active = s.active;
  ev.in_active_set = s.in_j;
  ev.column_increment_counts = s.col_increments;
  ev.active_columns = j_count;
  fn(ev);
}

SolveReport finish(ParState& s, SolveStatus status) {
  SolveReport report;
  report.status = status;
  report.x.resize(s.x.size());
  for (std::size_t j = 0; j < s.x.size(); ++j) report.x[j] = s.x[j] / s.u;
  s.counters.work_units = s.work.load();
  report.counters = s.counters;
  report.diagnostics = s.diag;
  return report;
}

}  // namespace

SolveReport solve_parallel(const MixedInstance& inst, const MpcOptionsParallel& options,
                           const MpcParallelHooks* hooks) {
  require_epsilon(options.epsilon);
  if (auto v = validate(inst); !v.ok) throw std::invalid_argument("solve_parallel: " + v.message);

  ParState s;
  s.inst = &inst;
  s.eps = options.epsilon;
  s.log2p = std::log2(1.0 + s.eps);
  s.log2c = std::log2(1.0 - s.eps);

  const std::int32_t n = inst.n;
  const std::int32_t mp = inst.packing_rows();
  const std::int32_t mc = inst.covering_rows();
  const double m = static_cast<double>(std::max(2, mp + mc));
  const std::size_t nn = static_cast<std::size_t>(n);

  ParallelRuntime pool(options.threads);

  // Start from x_j = n^-1 / (largest packing coefficient of column j); for
  // covering-only columns the covering maximum stands in, which keeps the
  // initial row values at most 1 as well.
  s.x.assign(nn, 0.0);
  s.retired.assign(nn, 0);
  s.in_j.assign(nn, 0);
  for (std::int32_t j = 0; j < n; ++j) {
    const auto& pcol = inst.packing.columns[static_cast<std::size_t>(j)];
    const auto& ccol = inst.covering.columns[static_cast<std::size_t>(j)];
    double denom = !pcol.empty() ? pcol.front().coef : (!ccol.empty() ? ccol.front().coef : 0.0);
    if (denom == 0.0) {
      s.retired[static_cast<std::size_t>(j)] = 1;  // empty column, stays at 0
    } else {
      s.x[static_cast<std::size_t>(j)] = 1.0 / (static_cast<double>(n) * denom);
    }
  }

  s.px.assign(static_cast<std::size_t>(mp), 0.0);
  s.cx.assign(static_cast<std::size_t>(mc), 0.0);
  s.p.resize(static_cast<std::size_t>(mp));
  s.c.resize(static_cast<std::size_t>(mc));
  s.active.assign(static_cast<std::size_t>(mc), 1);
  s.rp.assign(static_cast<std::size_t>(mp), 0.0);
  s.rc.assign(static_cast<std::size_t>(mc), 0.0);
  s.c_cols = inst.covering.columns;
  s.col_increments.assign(nn, 0);
  s.p_rows_live.resize(static_cast<std::size_t>(mp));
  s.c_rows_live.resize(static_cast<std::size_t>(mc));

  // Exact row values for the initial point fix U.
  for (std::int32_t i = 0; i < mp; ++i) {
    double v = 0.0;
    for (const auto& e : inst.packing.rows[static_cast<std::size_t>(i)].entries) {
      v += e.coef * s.x[static_cast<std::size_t>(e.column)];
    }
    s.max_px0 = std::max(s.max_px0, v);
  }
  s.u = (s.max_px0 + std::log(m)) / (s.eps * s.eps);
  s.diag.u = s.u;
  if (mc == 0) return finish(s, SolveStatus::Solved);

  const double cap = options.scaling_cap_factor * s.u;
  const ExtendedScalar guard_mult = ExtendedScalar::from_double(1.0 + s.eps);
  bool first_phase = true;

  for (;;) {
    // Phase start: rebuild every quantity from scratch.
    pool.for_chunks(static_cast<std::size_t>(mp), [&](std::size_t, std::size_t b, std::size_t e) {
      std::uint64_t touched = 0;
      for (std::size_t i = b; i < e; ++i) {
        double v = 0.0;
        const auto& row = inst.packing.rows[i].entries;
        for (const auto& en : row) v += en.coef * s.x[static_cast<std::size_t>(en.column)];
        s.px[i] = v;
        s.p[i] = ExtendedScalar::exp2_of(v * s.log2p);
        touched += row.size();
      }
      s.work += touched;
    });
    std::atomic<std::int64_t> newly_active{0};
    pool.for_chunks(static_cast<std::size_t>(mc), [&](std::size_t, std::size_t b, std::size_t e) {
      std::uint64_t touched = 0;
      std::int64_t active_here = 0;
      for (std::size_t i = b; i < e; ++i) {
        if (!s.active[i]) continue;
        double v = 0.0;
        const auto& row = inst.covering.rows[i].entries;
        for (const auto& en : row) v += en.coef * s.x[static_cast<std::size_t>(en.column)];
        s.cx[i] = v;
        touched += row.size();
        if (v >= s.u) {
          s.active[i] = 0;
          s.c[i] = ExtendedScalar{};
        } else {
          s.c[i] = ExtendedScalar::exp2_of(v * s.log2c);
          ++active_here;
        }
      }
      s.work += touched;
      newly_active += active_here;
    });
    s.active_rows.store(newly_active.load());
    if (s.active_rows.load() == 0) return finish(s, SolveStatus::Solved);

    if (first_phase) {
      // lambda0 = |p(x0)| / |c(x0)| (sequential sum: runs once).
      ExtendedScalar p_total, c_total;
      for (const auto& v : s.p) p_total += v;
      for (std::size_t i = 0; i < s.c.size(); ++i) {
        if (s.active[i]) c_total += s.c[i];
      }
      s.lambda0 = (mp > 0) ? p_total / c_total : ExtendedScalar{};
      first_phase = false;
    }

    // Infeasibility hook: values are exact here.
    if (mp > 0) {
      s.work += inst.nonzero_count();
      if (auto cert = detail::margins_certificate(inst, s.eps, s.u, s.x, s.p, s.c, s.active)) {
        SolveReport report = finish(s, SolveStatus::Infeasible);
        report.infeasibility = std::move(cert);
        return report;
      }
      ExtendedScalar p_total, c_total;
      for (const auto& v : s.p) p_total += v;
      for (std::size_t i = 0; i < s.c.size(); ++i) {
        if (s.active[i]) c_total += s.c[i];
      }
      if (detail::potential_violated(s.eps, m, s.u, s.max_px0, p_total, c_total)) {
        s.diag.potential_violations++;
      }
    }

    // Build J = { j : lambda(x, j) <= (1+eps) lambda0 }.
    const ExtendedScalar guard = s.lambda0 * guard_mult;
    std::atomic<std::int64_t> j_count{0};
    pool.for_chunks(nn, [&](std::size_t, std::size_t b, std::size_t e) {
      std::uint64_t touched = 0;
      std::int64_t here = 0;
      for (std::size_t j = b; j < e; ++j) {
        s.in_j[j] = 0;
        if (s.retired[j]) continue;
        ExtendedScalar pack_sum, cover_sum;
        for (const auto& en : inst.packing.columns[j]) {
          pack_sum += s.p[static_cast<std::size_t>(en.row)] * en.coef;
        }
        auto& ccol = s.c_cols[j];
        std::size_t keep = 0;
        for (const auto& en : ccol) {
          if (!s.active[static_cast<std::size_t>(en.row)]) continue;
          ccol[keep++] = en;
          cover_sum += s.c[static_cast<std::size_t>(en.row)] * en.coef;
        }
        ccol.resize(keep);
        touched += inst.packing.columns[j].size() + ccol.size();
        if (cover_sum.is_zero()) {
          s.retired[j] = 1;
          continue;
        }
        if (pack_sum <= guard * cover_sum) {
          s.in_j[j] = 1;
          ++here;
        }
      }
      s.work += touched;
      j_count += here;
    });

    if (j_count.load() > 0) {
      // Live column/row id lists for this phase.
      s.phase_cols.clear();
      for (std::int32_t j = 0; j < n; ++j) {
        if (s.in_j[static_cast<std::size_t>(j)]) s.phase_cols.push_back(j);
      }
      pool.for_chunks(static_cast<std::size_t>(mp), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          auto& live = s.p_rows_live[i];
          live.clear();
          for (const auto& en : inst.packing.rows[i].entries) {
            if (s.in_j[static_cast<std::size_t>(en.column)]) live.push_back(en);
          }
        }
      });
      pool.for_chunks(static_cast<std::size_t>(mc), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          auto& live = s.c_rows_live[i];
          live.clear();
          if (!s.active[i]) continue;
          for (const auto& en : inst.covering.rows[i].entries) {
            if (s.in_j[static_cast<std::size_t>(en.column)]) live.push_back(en);
          }
        }
      });
      s.live_p_rows.clear();
      for (std::int32_t i = 0; i < mp; ++i) {
        if (!s.p_rows_live[static_cast<std::size_t>(i)].empty()) s.live_p_rows.push_back(i);
      }
      s.live_c_rows.clear();
      for (std::int32_t i = 0; i < mc; ++i) {
        if (!s.c_rows_live[static_cast<std::size_t>(i)].empty()) s.live_c_rows.push_back(i);
      }

      // Increments until J empties.
      std::int64_t live_j = j_count.load();
      const std::size_t np_rows = s.live_p_rows.size();
      const std::size_t nc_rows = s.live_c_rows.size();
      std::vector<double> chunk_max_p(ParallelRuntime::chunk_count(np_rows), 0.0);
      std::vector<double> chunk_max_c(ParallelRuntime::chunk_count(nc_rows), 0.0);
      while (live_j > 0) {
        // Half-step 1 (rows): candidate increases over live edges.
        pool.for_chunks(np_rows, [&](std::size_t chunk, std::size_t b, std::size_t e) {
          std::uint64_t touched = 0;
          double mx = 0.0;
          for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = static_cast<std::size_t>(s.live_p_rows[k]);
            auto& live = s.p_rows_live[i];
            double r = 0.0;
            std::size_t keep = 0;
            for (const auto& en : live) {
              if (!s.in_j[static_cast<std::size_t>(en.column)]) continue;
              live[keep++] = en;
              r += en.coef * s.x[static_cast<std::size_t>(en.column)];
            }
            live.resize(keep);
            touched += keep;
            s.rp[i] = r;
            mx = std::max(mx, r);
          }
          s.work += touched;
          chunk_max_p[chunk] = mx;
        });
        pool.for_chunks(nc_rows, [&](std::size_t chunk, std::size_t b, std::size_t e) {
          std::uint64_t touched = 0;
          double mx = 0.0;
          for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = static_cast<std::size_t>(s.live_c_rows[k]);
            auto& live = s.c_rows_live[i];
            if (!s.active[i]) {
              live.clear();
              s.rc[i] = 0.0;
              continue;
            }
            double r = 0.0;
            std::size_t keep = 0;
            for (const auto& en : live) {
              if (!s.in_j[static_cast<std::size_t>(en.column)]) continue;
              live[keep++] = en;
              r += en.coef * s.x[static_cast<std::size_t>(en.column)];
            }
            live.resize(keep);
            touched += keep;
            s.rc[i] = r;
            mx = std::max(mx, r);
          }
          s.work += touched;
          chunk_max_c[chunk] = mx;
        });
        double max_rise = 0.0;
        for (double v : chunk_max_p) max_rise = std::max(max_rise, v);
        for (double v : chunk_max_c) max_rise = std::max(max_rise, v);
        if (max_rise == 0.0) break;  // no live edge left; treat as empty J

        const double z = 1.0 / max_rise;
        s.counters.increments++;
        s.diag.min_step = std::min(s.diag.min_step, z);
        if (z < 1.0 / (4.0 * s.u)) s.diag.z_below_quarter_u++;

        // Half-step 2 (columns then rows): apply the multiplicative bump.
        pool.for_chunks(s.phase_cols.size(), [&](std::size_t, std::size_t b, std::size_t e) {
          for (std::size_t k = b; k < e; ++k) {
            const std::size_t j = static_cast<std::size_t>(s.phase_cols[k]);
            if (!s.in_j[j]) continue;
            s.x[j] += z * s.x[j];
            s.col_increments[j]++;
          }
        });
        std::atomic<std::int64_t> deactivated{0};
        pool.for_chunks(np_rows, [&](std::size_t, std::size_t b, std::size_t e) {
          for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = static_cast<std::size_t>(s.live_p_rows[k]);
            if (s.rp[i] == 0.0) continue;
            s.px[i] += z * s.rp[i];
            s.p[i] = ExtendedScalar::exp2_of(s.px[i] * s.log2p);
          }
        });
        pool.for_chunks(nc_rows, [&](std::size_t, std::size_t b, std::size_t e) {
          std::int64_t d = 0;
          for (std::size_t k = b; k < e; ++k) {
            const std::size_t i = static_cast<std::size_t>(s.live_c_rows[k]);
            if (!s.active[i] || s.rc[i] == 0.0) continue;
            s.cx[i] += z * s.rc[i];
            if (s.cx[i] >= s.u) {
              s.active[i] = 0;
              s.c[i] = ExtendedScalar{};
              ++d;
            } else {
              s.c[i] = ExtendedScalar::exp2_of(s.cx[i] * s.log2c);
            }
          }
          deactivated += d;
        });
        s.active_rows -= deactivated.load();

        // Half-step 3 (columns): refresh prices of active columns, shrink J.
        std::atomic<std::int64_t> removed{0};
        pool.for_chunks(s.phase_cols.size(), [&](std::size_t, std::size_t b, std::size_t e) {
          std::uint64_t touched = 0;
          std::int64_t rm = 0;
          for (std::size_t k = b; k < e; ++k) {
            const std::size_t j = static_cast<std::size_t>(s.phase_cols[k]);
            if (!s.in_j[j]) continue;
            ExtendedScalar pack_sum, cover_sum;
            for (const auto& en : inst.packing.columns[j]) {
              pack_sum += s.p[static_cast<std::size_t>(en.row)] * en.coef;
            }
            auto& ccol = s.c_cols[j];
            std::size_t keep = 0;
            for (const auto& en : ccol) {
              if (!s.active[static_cast<std::size_t>(en.row)]) continue;
              ccol[keep++] = en;
              cover_sum += s.c[static_cast<std::size_t>(en.row)] * en.coef;
            }
            ccol.resize(keep);
            touched += inst.packing.columns[j].size() + keep;
            if (cover_sum.is_zero()) {
              s.retired[j] = 1;
              s.in_j[j] = 0;
              ++rm;
            } else if (!(pack_sum <= guard * cover_sum)) {
              s.in_j[j] = 0;
              ++rm;
            }
          }
          s.work += touched;
          removed += rm;
        });
        live_j -= removed.load();

        if (hooks && hooks->on_increment) {
          emit_event(s, ParallelEvent::Kind::Increment, z, static_cast<std::size_t>(live_j),
                     hooks->on_increment);
        }
        if (s.active_rows.load() == 0) return finish(s, SolveStatus::Solved);
      }
    }

    if (hooks && hooks->on_phase_end) {
      emit_event(s, ParallelEvent::Kind::PhaseEnd, 0.0, 0, hooks->on_phase_end);
    }
    s.lambda0 *= (1.0 + s.eps);
    s.counters.scalings++;
    s.phase++;
    if (static_cast<double>(s.counters.scalings) > cap) {
      return finish(s, SolveStatus::IterationCapExceeded);
    }
  }
}

}  // namespace poslp
