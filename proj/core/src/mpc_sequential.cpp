#include "poslp/mpc_sequential.hpp"

#include <cmath>
#include <stdexcept>

#include "poslp/column_maxima.hpp"
#include "pc_internal.hpp"

namespace poslp {

namespace {

// Smallest power of two >= coef, as an exponent.
std::int32_t top_exponent(double coef) {
  int e = 0;
  const double f = std::frexp(coef, &e);  // coef = f * 2^e, f in [0.5, 1)
  return (f == 0.5) ? e - 1 : e;
}

// A maximal slice of one sorted column whose coefficients share a top.
// checkpoint records x_j at the group's last estimate push within the run
// tagged run_id; lags are reconstructed from it rather than accumulated.
struct Group {
  std::int32_t begin = 0;
  std::int32_t end = 0;
  std::int32_t top_exp = 0;
  double eligibility = 0.0;  // 1 / 2^(top_exp + 1), exact
  double checkpoint = 0.0;
  std::uint64_t run_id = 0;
};

std::vector<std::vector<Group>> build_groups(const SparseConstraintSystem& sys) {
  std::vector<std::vector<Group>> out(sys.columns.size());
  for (std::size_t j = 0; j < sys.columns.size(); ++j) {
    const auto& col = sys.columns[j];
    std::size_t k = 0;
    while (k < col.size()) {
      Group g;
      g.begin = static_cast<std::int32_t>(k);
      g.top_exp = top_exponent(col[k].coef);
      g.eligibility = std::ldexp(1.0, -(g.top_exp + 1));
      while (k < col.size() && top_exponent(col[k].coef) == g.top_exp) ++k;
      g.end = static_cast<std::int32_t>(k);
      out[j].push_back(g);
    }
  }
  return out;
}

struct SeqState {
  const MixedInstance* inst = nullptr;
  double eps = 0.0, u = 0.0, log2p = 0.0, log2c = 0.0;

  std::vector<double> x;
  std::vector<double> p_hat, c_hat;           // estimate exponents P-hat, C-hat
  std::vector<ExtendedScalar> p_es, c_es;     // (1+eps)^P-hat, (1-eps)^C-hat or 0
  std::vector<std::uint8_t> active;
  std::int32_t active_rows = 0;
  ActiveColumnMaxima c_maxima;

  std::vector<std::vector<Group>> p_groups, c_groups;
  std::vector<std::uint8_t> retired;  // no active covering rows left in column

  std::uint64_t run_id = 0;
  double run_start_x = 0.0;

  std::vector<std::uint32_t> p_upd, c_upd;          // estimate pushes per row
  std::vector<std::uint32_t> p_touch, c_touch;      // runs whose column holds the row

  ExtendedScalar lambda0;
  ExtendedScalar pack_sum, cover_sum;  // column price sums for the running column

  SolveCounters counters;
  SolveDiagnostics diag;
};

double group_checkpoint(const SeqState& s, const Group& g) {
  return g.run_id == s.run_id ? g.checkpoint : s.run_start_x;
}

// Pushes group members' estimates forward by the group's lag.  Returns the
// number of deactivations it caused.
std::int32_t push_group(SeqState& s, std::int32_t j, Group& g, bool packing_side, double lag) {
  const auto& col = packing_side ? s.inst->packing.columns[static_cast<std::size_t>(j)]
                                 : s.inst->covering.columns[static_cast<std::size_t>(j)];
  std::int32_t deactivated = 0;
  for (std::int32_t k = g.begin; k < g.end; ++k) {
    const auto& e = col[static_cast<std::size_t>(k)];
    const std::size_t i = static_cast<std::size_t>(e.row);
    if (packing_side) {
      s.p_hat[i] += e.coef * lag;
      const ExtendedScalar fresh = ExtendedScalar::exp2_of(s.p_hat[i] * s.log2p);
      s.pack_sum += (fresh - s.p_es[i]) * e.coef;
      s.p_es[i] = fresh;
      s.p_upd[i]++;
    } else {
      if (!s.active[i]) continue;
      s.c_hat[i] += e.coef * lag;
      ExtendedScalar fresh;
      if (s.c_hat[i] >= s.u) {
        s.active[i] = 0;
        --s.active_rows;
        ++deactivated;
      } else {
        fresh = ExtendedScalar::exp2_of(s.c_hat[i] * s.log2c);
      }
      s.cover_sum += (fresh - s.c_es[i]) * e.coef;
      s.c_es[i] = fresh;
      s.c_upd[i]++;
    }
    s.counters.estimate_updates++;
    s.counters.work_units++;
  }
  g.checkpoint = s.x[static_cast<std::size_t>(j)];
  g.run_id = s.run_id;
  return deactivated;
}

// Periodic sampling pass after one increment: walk groups from the largest
// top; push each group whose lag reached 1/2^(t+1); stop at the first group
// that has not, regardless of anything below it.
void sampling_pass(SeqState& s, std::int32_t j, bool packing_side) {
  auto& groups = packing_side ? s.p_groups[static_cast<std::size_t>(j)]
                              : s.c_groups[static_cast<std::size_t>(j)];
  const double xj = s.x[static_cast<std::size_t>(j)];
  for (auto& g : groups) {
    const double lag = xj - group_checkpoint(s, g);
    if (lag < g.eligibility) break;
    push_group(s, j, g, packing_side, lag);
  }
}

// Unconditional push of every group's residual lag at the end of a run;
// estimates for rows of column j become exact again.
void flush_run(SeqState& s, std::int32_t j) {
  for (bool packing_side : {true, false}) {
    auto& groups = packing_side ? s.p_groups[static_cast<std::size_t>(j)]
                                : s.c_groups[static_cast<std::size_t>(j)];
    const double xj = s.x[static_cast<std::size_t>(j)];
    for (auto& g : groups) {
      const double lag = xj - group_checkpoint(s, g);
      if (lag > 0.0) {
        push_group(s, j, g, packing_side, lag);
      } else {
        g.checkpoint = xj;
        g.run_id = s.run_id;
      }
    }
  }
}

void fill_group_debug(const SeqState& s, std::int32_t j, std::vector<SequentialGroupDebug>& out,
                      bool packing_side) {
  const auto& groups = packing_side ? s.p_groups[static_cast<std::size_t>(j)]
                                    : s.c_groups[static_cast<std::size_t>(j)];
  const double xj = s.x[static_cast<std::size_t>(j)];
  out.clear();
  out.reserve(groups.size());
  for (const auto& g : groups) {
    out.push_back({g.top_exp, xj - group_checkpoint(s, g)});
  }
}

void emit_event(const SeqState& s, SequentialEvent::Kind kind, std::int32_t j, double z,
                const std::function<void(const SequentialEvent&)>& fn) {
  SequentialEvent ev;
  ev.kind = kind;
  ev.column = j;
  ev.z = z;
  ev.u = s.u;
  ev.lambda0 = s.lambda0;
  ev.x = s.x;
  ev.packing_estimates = s.p_hat;
  ev.covering_estimates = s.c_hat;
  ev.covering_active = s.active;
  ev.packing_update_counts = s.p_upd;
  ev.covering_update_counts = s.c_upd;
  ev.packing_run_touches = s.p_touch;
  ev.covering_run_touches = s.c_touch;
  ev.column_pack_sum = s.pack_sum;
  ev.column_cover_sum = s.cover_sum;
  if (kind == SequentialEvent::Kind::Increment && j >= 0) {
    fill_group_debug(s, j, ev.packing_groups, true);
    fill_group_debug(s, j, ev.covering_groups, false);
  }
  fn(ev);
}

SolveReport finish(SeqState& s, SolveStatus status) {
  SolveReport report;
  report.status = status;
  report.x.resize(s.x.size());
  for (std::size_t j = 0; j < s.x.size(); ++j) report.x[j] = s.x[j] / s.u;
  report.counters = s.counters;
  report.diagnostics = s.diag;
  return report;
}

}  // namespace

SolveReport solve_sequential(const MixedInstance& inst, const MpcOptionsSequential& options,
                             const MpcSequentialHooks* hooks) {
  require_epsilon(options.epsilon);
  if (auto v = validate(inst); !v.ok) throw std::invalid_argument("solve_sequential: " + v.message);

  SeqState s;
  s.inst = &inst;
  s.eps = options.epsilon;
  s.log2p = std::log2(1.0 + s.eps);
  s.log2c = std::log2(1.0 - s.eps);

  const std::int32_t n = inst.n;
  const std::int32_t mp = inst.packing_rows();
  const std::int32_t mc = inst.covering_rows();
  const double m = static_cast<double>(std::max(2, mp + mc));
  s.u = std::log(m) / (s.eps * s.eps);
  s.diag.u = s.u;

  s.x.assign(static_cast<std::size_t>(n), 0.0);
  s.p_hat.assign(static_cast<std::size_t>(mp), 0.0);
  s.c_hat.assign(static_cast<std::size_t>(mc), 0.0);
  s.p_es.assign(static_cast<std::size_t>(mp), ExtendedScalar::from_double(1.0));
  s.c_es.assign(static_cast<std::size_t>(mc), ExtendedScalar::from_double(1.0));
  s.active.assign(static_cast<std::size_t>(mc), 1);
  s.active_rows = mc;
  s.p_upd.assign(static_cast<std::size_t>(mp), 0);
  s.c_upd.assign(static_cast<std::size_t>(mc), 0);
  s.p_touch.assign(static_cast<std::size_t>(mp), 0);
  s.c_touch.assign(static_cast<std::size_t>(mc), 0);
  s.c_maxima.reset(inst.covering, s.active);
  s.p_groups = build_groups(inst.packing);
  s.c_groups = build_groups(inst.covering);
  s.retired.assign(static_cast<std::size_t>(n), 0);

  if (mc == 0) return finish(s, SolveStatus::Solved);

  s.lambda0 = (mp > 0)
                  ? ExtendedScalar::from_double(static_cast<double>(mp)) /
                        ExtendedScalar::from_double(static_cast<double>(mc))
                  : ExtendedScalar{};
  const double cap = options.scaling_cap_factor * s.u;
  const double guard_factor = (1.0 + s.eps) * (1.0 + s.eps) / (1.0 - s.eps);

  for (;;) {
    bool done = false;
    for (std::int32_t j = 0; j < n && !done; ++j) {
      if (s.retired[static_cast<std::size_t>(j)]) continue;
      const auto& pcol = inst.packing.columns[static_cast<std::size_t>(j)];
      const auto& ccol = inst.covering.columns[static_cast<std::size_t>(j)];

      // Run start: fresh column price sums from the current estimates.
      s.pack_sum = {};
      for (const auto& e : pcol) {
        s.pack_sum += s.p_es[static_cast<std::size_t>(e.row)] * e.coef;
        s.p_touch[static_cast<std::size_t>(e.row)]++;
      }
      s.cover_sum = {};
      for (const auto& e : ccol) {
        if (s.active[static_cast<std::size_t>(e.row)]) {
          s.cover_sum += s.c_es[static_cast<std::size_t>(e.row)] * e.coef;
        }
        s.c_touch[static_cast<std::size_t>(e.row)]++;
      }
      s.counters.work_units += pcol.size() + ccol.size();
      if (s.cover_sum.is_zero()) {
        s.retired[static_cast<std::size_t>(j)] = 1;
        continue;
      }

      s.run_id++;
      s.run_start_x = s.x[static_cast<std::size_t>(j)];
      const ExtendedScalar guard = s.lambda0 * guard_factor;
      bool did_increment = false;

      while (!s.cover_sum.is_zero() && s.pack_sum <= guard * s.cover_sum) {
        const double pmax = static_column_max(inst.packing, j);
        const double cmax = s.c_maxima.max_coef(j);
        const double z = 0.5 / std::max(pmax, cmax);
        s.x[static_cast<std::size_t>(j)] += z;
        s.counters.increments++;
        s.diag.min_step = std::min(s.diag.min_step, z);
        did_increment = true;

        const ExtendedScalar cover_before = s.cover_sum;
        sampling_pass(s, j, true);
        sampling_pass(s, j, false);
        if (detail::sum_needs_refresh(cover_before, s.cover_sum)) {
          s.cover_sum = {};
          for (const auto& e : ccol) {
            if (s.active[static_cast<std::size_t>(e.row)]) {
              s.cover_sum += s.c_es[static_cast<std::size_t>(e.row)] * e.coef;
            }
          }
          s.counters.work_units += ccol.size();
        }

        if (hooks && hooks->on_increment) {
          emit_event(s, SequentialEvent::Kind::Increment, j, z, hooks->on_increment);
        }
        if (s.active_rows == 0) break;
      }

      if (did_increment) {
        flush_run(s, j);
        s.counters.work_units += pcol.size() + ccol.size();
      }
      if (hooks && hooks->on_run_boundary) {
        emit_event(s, SequentialEvent::Kind::RunBoundary, j, 0.0, hooks->on_run_boundary);
      }
      if (s.active_rows == 0) done = true;
    }
    if (done) break;

    // Sweep done; estimates are exact here, which makes this the natural
    // place for the Lemma `pc:lambda` infeasibility test.
    if (mp > 0) {
      s.counters.work_units += inst.nonzero_count();
      if (auto cert = detail::margins_certificate(inst, s.eps, s.u, s.x, s.p_es, s.c_es, s.active)) {
        SolveReport report = finish(s, SolveStatus::Infeasible);
        report.infeasibility = std::move(cert);
        return report;
      }
      ExtendedScalar p_total, c_total;
      for (const auto& v : s.p_es) p_total += v;
      for (std::size_t i = 0; i < s.c_es.size(); ++i) {
        if (s.active[i]) c_total += s.c_es[i];
      }
      if (detail::potential_violated(s.eps, m, s.u, 0.0, p_total, c_total)) {
        s.diag.potential_violations++;
      }
    }
    if (hooks && hooks->on_scaling) {
      emit_event(s, SequentialEvent::Kind::Scaling, -1, 0.0, hooks->on_scaling);
    }
    s.lambda0 *= (1.0 + s.eps);
    s.counters.scalings++;
    if (static_cast<double>(s.counters.scalings) > cap) {
      return finish(s, SolveStatus::IterationCapExceeded);
    }
  }
  return finish(s, SolveStatus::Solved);
}

}  // namespace poslp
