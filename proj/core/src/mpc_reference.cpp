#include "poslp/mpc_reference.hpp"

#include <cmath>
#include <stdexcept>

#include "poslp/column_maxima.hpp"
#include "pc_internal.hpp"

namespace poslp {

namespace {

struct RefState {
  const MixedInstance* inst = nullptr;
  double eps = 0.0, u = 0.0;
  double log2p = 0.0, log2c = 0.0;  // log2(1+eps), log2(1-eps)

  std::vector<double> x;
  std::vector<double> px, cx;  // exact row values
  std::vector<ExtendedScalar> p, c;
  ExtendedScalar p_total, c_total;
  std::vector<std::uint8_t> c_active;
  std::int32_t active_rows = 0;
  ActiveColumnMaxima c_maxima;

  ExtendedScalar lambda0;
  SolveCounters counters;
  SolveDiagnostics diag;

  void refresh_totals() {
    p_total = {};
    for (const auto& v : p) p_total += v;
    c_total = {};
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c_active[i]) c_total += c[i];
    }
  }
};

// Column price sums for the running column; rebuilt at run start, patched
// per increment, refreshed when the patch loses the magnitude.
struct ColumnSums {
  ExtendedScalar pack, cover;
};

ExtendedScalar column_pack_sum(const RefState& s, std::int32_t j) {
  ExtendedScalar sum;
  for (const auto& e : s.inst->packing.columns[static_cast<std::size_t>(j)]) {
    sum += s.p[static_cast<std::size_t>(e.row)] * e.coef;
  }
  return sum;
}

ExtendedScalar column_cover_sum(const RefState& s, std::int32_t j) {
  ExtendedScalar sum;
  for (const auto& e : s.inst->covering.columns[static_cast<std::size_t>(j)]) {
    if (s.c_active[static_cast<std::size_t>(e.row)]) {
      sum += s.c[static_cast<std::size_t>(e.row)] * e.coef;
    }
  }
  return sum;
}

void emit_event(const RefState& s, std::int32_t j, double z, const ColumnSums& sums,
                const std::function<void(const MpcEvent&)>& fn) {
  MpcEvent ev;
  ev.column = j;
  ev.z = z;
  ev.u = s.u;
  ev.lambda0 = s.lambda0;
  if (j >= 0) {
    ev.lambda_j = sums.cover.is_zero() ? ExtendedScalar{} : sums.pack / sums.cover;
  }
  ev.p_total = s.p_total;
  ev.c_total = s.c_total;
  ev.x = s.x;
  ev.packing_values = s.px;
  ev.covering_values = s.cx;
  ev.covering_active = s.c_active;
  fn(ev);
}

SolveReport finish(RefState& s, SolveStatus status) {
  SolveReport report;
  report.status = status;
  report.x.resize(s.x.size());
  for (std::size_t j = 0; j < s.x.size(); ++j) report.x[j] = s.x[j] / s.u;
  report.counters = s.counters;
  report.diagnostics = s.diag;
  return report;
}

}  // namespace

SolveReport solve_reference(const MixedInstance& inst, const MpcOptions& options,
                            const MpcReferenceHooks* hooks) {
  require_epsilon(options.epsilon);
  if (auto v = validate(inst); !v.ok) throw std::invalid_argument("solve_reference: " + v.message);

  RefState s;
  s.inst = &inst;
  s.eps = options.epsilon;
  s.log2p = std::log2(1.0 + s.eps);
  s.log2c = std::log2(1.0 - s.eps);

  const std::int32_t n = inst.n;
  const std::int32_t mp = inst.packing_rows();
  const std::int32_t mc = inst.covering_rows();
  const double m = static_cast<double>(std::max(2, mp + mc));

  s.x.assign(static_cast<std::size_t>(n), 0.0);
  if (!options.x0.empty()) {
    if (options.x0.size() != s.x.size()) throw std::invalid_argument("x0 dimension mismatch");
    s.x = options.x0;
  }
  s.px.assign(static_cast<std::size_t>(mp), 0.0);
  s.cx.assign(static_cast<std::size_t>(mc), 0.0);
  for (std::int32_t i = 0; i < mp; ++i) {
    for (const auto& e : inst.packing.rows[static_cast<std::size_t>(i)].entries) {
      s.px[static_cast<std::size_t>(i)] += e.coef * s.x[static_cast<std::size_t>(e.column)];
    }
  }
  for (std::int32_t i = 0; i < mc; ++i) {
    for (const auto& e : inst.covering.rows[static_cast<std::size_t>(i)].entries) {
      s.cx[static_cast<std::size_t>(i)] += e.coef * s.x[static_cast<std::size_t>(e.column)];
    }
  }
  double max_px0 = 0.0;
  for (double v : s.px) max_px0 = std::max(max_px0, v);
  s.u = (max_px0 + std::log(m)) / (s.eps * s.eps);
  s.diag.u = s.u;

  s.p.resize(static_cast<std::size_t>(mp));
  for (std::int32_t i = 0; i < mp; ++i) {
    s.p[static_cast<std::size_t>(i)] =
        ExtendedScalar::exp2_of(s.px[static_cast<std::size_t>(i)] * s.log2p);
  }
  s.c.resize(static_cast<std::size_t>(mc));
  s.c_active.assign(static_cast<std::size_t>(mc), 1);
  s.active_rows = mc;
  for (std::int32_t i = 0; i < mc; ++i) {
    if (s.cx[static_cast<std::size_t>(i)] >= s.u) {
      s.c_active[static_cast<std::size_t>(i)] = 0;
      --s.active_rows;
    } else {
      s.c[static_cast<std::size_t>(i)] =
          ExtendedScalar::exp2_of(s.cx[static_cast<std::size_t>(i)] * s.log2c);
    }
  }
  s.refresh_totals();
  s.c_maxima.reset(inst.covering, s.c_active);

  if (mc == 0 || s.active_rows == 0) return finish(s, SolveStatus::Solved);

  s.lambda0 = (mp > 0) ? s.p_total / s.c_total : ExtendedScalar{};
  const double cap = options.scaling_cap_factor * s.u;
  const ExtendedScalar guard_mult = ExtendedScalar::from_double(1.0 + 4.0 * s.eps);

  for (;;) {
    bool done = false;
    for (std::int32_t j = 0; j < n && !done; ++j) {
      const auto& pcol = inst.packing.columns[static_cast<std::size_t>(j)];
      ColumnSums sums;
      sums.pack = column_pack_sum(s, j);
      sums.cover = column_cover_sum(s, j);
      s.counters.work_units += pcol.size() + inst.covering.columns[static_cast<std::size_t>(j)].size();
      if (sums.cover.is_zero()) continue;  // column retired

      const ExtendedScalar guard = s.lambda0 * guard_mult;
      while (!sums.cover.is_zero() && sums.pack <= guard * sums.cover) {
        const double pmax = static_column_max(inst.packing, j);
        const double cmax = s.c_maxima.max_coef(j);
        const double denom = std::max(pmax, cmax);
        const double z = 0.5 / denom;
        s.x[static_cast<std::size_t>(j)] += z;
        s.counters.increments++;
        s.diag.min_step = std::min(s.diag.min_step, z);

        for (const auto& e : pcol) {
          const std::size_t i = static_cast<std::size_t>(e.row);
          s.px[i] += e.coef * z;
          const ExtendedScalar fresh = ExtendedScalar::exp2_of(s.px[i] * s.log2p);
          const ExtendedScalar delta = fresh - s.p[i];
          s.p[i] = fresh;
          s.p_total += delta;
          sums.pack += delta * e.coef;
        }
        s.counters.work_units += pcol.size();

        const ExtendedScalar cover_before = sums.cover;
        for (const auto& e : inst.covering.columns[static_cast<std::size_t>(j)]) {
          const std::size_t i = static_cast<std::size_t>(e.row);
          if (!s.c_active[i]) continue;
          s.counters.work_units++;
          s.cx[i] += e.coef * z;
          ExtendedScalar fresh;
          if (s.cx[i] >= s.u) {
            s.c_active[i] = 0;
            --s.active_rows;
          } else {
            fresh = ExtendedScalar::exp2_of(s.cx[i] * s.log2c);
          }
          const ExtendedScalar delta = fresh - s.c[i];
          s.c[i] = fresh;
          s.c_total += delta;
          sums.cover += delta * e.coef;
        }
        if (detail::sum_needs_refresh(cover_before, sums.cover)) {
          sums.cover = column_cover_sum(s, j);
          s.refresh_totals();
          s.counters.work_units += inst.covering.columns[static_cast<std::size_t>(j)].size();
        }

        if (hooks && hooks->on_increment) emit_event(s, j, z, sums, hooks->on_increment);

        if (s.active_rows == 0) {
          done = true;
          break;
        }
      }
    }
    if (done) break;

    // Full sweep finished: every column price exceeded the guard, so the
    // rescaling precondition holds.  This is also the infeasibility hook.
    s.refresh_totals();
    s.counters.work_units += static_cast<std::uint64_t>(mp + mc);
    if (detail::potential_violated(s.eps, m, s.u, max_px0, s.p_total, s.c_total)) {
      s.diag.potential_violations++;
    }
    if (mp > 0) {
      s.counters.work_units += inst.nonzero_count();
      if (auto cert = detail::margins_certificate(inst, s.eps, s.u, s.x, s.p, s.c, s.c_active)) {
        SolveReport report = finish(s, SolveStatus::Infeasible);
        report.infeasibility = std::move(cert);
        return report;
      }
    }
    if (hooks && hooks->on_scaling) emit_event(s, -1, 0.0, {}, hooks->on_scaling);
    s.lambda0 *= (1.0 + s.eps);
    s.counters.scalings++;
    if (static_cast<double>(s.counters.scalings) > cap) {
      return finish(s, SolveStatus::IterationCapExceeded);
    }
  }
  return finish(s, SolveStatus::Solved);
}

}  // namespace poslp
