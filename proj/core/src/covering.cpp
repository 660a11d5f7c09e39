#include "poslp/covering.hpp"

#include <cmath>
#include <stdexcept>

#include "poslp/column_maxima.hpp"
#include "pc_internal.hpp"

namespace poslp {

namespace {

struct CoverState {
  const CoveringInstance* inst = nullptr;
  double eps = 0.0, u = 0.0, log2a = 0.0;

  std::vector<double> x;
  std::vector<double> ax;
  std::vector<ExtendedScalar> a;
  ExtendedScalar a_total;
  std::vector<std::uint8_t> active;
  std::int32_t active_rows = 0;
  ActiveColumnMaxima maxima;

  ExtendedScalar lambda0;
  double best_bound = 0.0;
  BoundWitness witness;
  double cost_x0 = 0.0;

  SolveCounters counters;
  SolveDiagnostics diag;
};

ExtendedScalar column_credit(const CoverState& s, std::int32_t j) {
  ExtendedScalar sum;
  for (const auto& e : s.inst->system.columns[static_cast<std::size_t>(j)]) {
    if (s.active[static_cast<std::size_t>(e.row)]) {
      sum += s.a[static_cast<std::size_t>(e.row)] * e.coef;
    }
  }
  return sum;
}

void refresh_total(CoverState& s) {
  s.a_total = {};
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    if (s.active[i]) s.a_total += s.a[i];
  }
}

// Tracks the running max of |a(x)| * lambda*(x); snapshots x when it improves.
void update_dual_bound(CoverState& s) {
  const std::int32_t n = s.inst->n();
  bool any = false;
  ExtendedScalar lambda_star;
  for (std::int32_t j = 0; j < n; ++j) {
    const ExtendedScalar credit = column_credit(s, j);
    s.counters.work_units += s.inst->system.columns[static_cast<std::size_t>(j)].size();
    if (credit.is_zero()) continue;
    const ExtendedScalar lam =
        ExtendedScalar::from_double(s.inst->costs[static_cast<std::size_t>(j)]) / credit;
    if (!any || lam < lambda_star) {
      lambda_star = lam;
      any = true;
    }
  }
  if (!any) return;
  const double bound = (s.a_total * lambda_star).to_double();
  if (bound > s.best_bound) {
    s.best_bound = bound;
    s.witness.lower_bound = bound;
    s.witness.x_snapshot = s.x;
    s.witness.lambda_star_mantissa = lambda_star.mantissa();
    s.witness.lambda_star_exp2 = lambda_star.exponent();
  }
}

void monitor_potential(CoverState& s) {
  if (s.best_bound <= 0.0) return;
  const double m = static_cast<double>(s.inst->rows());
  const double ln1a = std::log1p(-s.eps);
  const double lmin_a = s.a_total.is_zero() ? s.u : s.a_total.ln_abs() / ln1a;
  double cost = 0.0;
  for (std::int32_t j = 0; j < s.inst->n(); ++j) {
    cost += s.inst->costs[static_cast<std::size_t>(j)] * s.x[static_cast<std::size_t>(j)];
  }
  const double lhs = (1.0 + 6.0 * s.eps) * (lmin_a - std::log(m) / ln1a);
  const double rhs = (cost - s.cost_x0) / s.best_bound;
  if (lhs < rhs - 1e-9 * (std::fabs(lhs) + std::fabs(rhs) + 1.0)) {
    s.diag.potential_violations++;
  }
}

void emit_event(const CoverState& s, std::int32_t j, double step,
                const std::function<void(const CoveringEvent&)>& fn) {
  CoveringEvent ev;
  ev.column = j;
  ev.step = step;
  ev.u = s.u;
  ev.lambda0 = s.lambda0;
  ev.a_total = s.a_total;
  ev.x = s.x;
  ev.row_values = s.ax;
  ev.row_active = s.active;
  ev.best_lower_bound = s.best_bound;
  fn(ev);
}

SolveReport finish(CoverState& s, SolveStatus status) {
  SolveReport report;
  report.status = status;
  report.x.resize(s.x.size());
  double cost = 0.0;
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    report.x[j] = s.x[j] / s.u;
    cost += s.inst->costs[j] * report.x[j];
  }
  report.cost = cost;
  report.lower_bound = s.best_bound;
  if (s.best_bound > 0.0) {
    s.witness.epsilon = s.eps;
    s.witness.u = s.u;
    report.bound = s.witness;
  }
  report.counters = s.counters;
  report.diagnostics = s.diag;
  return report;
}

}  // namespace

SolveReport solve_covering(const CoveringInstance& inst, const CoveringOptions& options,
                           const CoveringHooks* hooks) {
  require_epsilon(options.epsilon);
  if (auto v = validate(inst); !v.ok) throw std::invalid_argument("solve_covering: " + v.message);

  CoverState s;
  s.inst = &inst;
  s.eps = options.epsilon;
  s.log2a = std::log2(1.0 - s.eps);
  const std::int32_t n = inst.n();
  const std::int32_t m = inst.rows();
  s.u = std::log(static_cast<double>(std::max(2, m))) / (s.eps * s.eps);
  s.diag.u = s.u;

  s.x.assign(static_cast<std::size_t>(n), 0.0);
  if (!options.x0.empty()) {
    if (options.x0.size() != s.x.size()) throw std::invalid_argument("x0 dimension mismatch");
    s.x = options.x0;
  }
  for (std::int32_t j = 0; j < n; ++j) {
    s.cost_x0 += inst.costs[static_cast<std::size_t>(j)] * s.x[static_cast<std::size_t>(j)];
  }
  s.ax.assign(static_cast<std::size_t>(m), 0.0);
  for (std::int32_t i = 0; i < m; ++i) {
    for (const auto& e : inst.system.rows[static_cast<std::size_t>(i)].entries) {
      s.ax[static_cast<std::size_t>(i)] += e.coef * s.x[static_cast<std::size_t>(e.column)];
    }
  }
  s.a.resize(static_cast<std::size_t>(m));
  s.active.assign(static_cast<std::size_t>(m), 1);
  s.active_rows = m;
  for (std::int32_t i = 0; i < m; ++i) {
    if (s.ax[static_cast<std::size_t>(i)] >= s.u) {
      s.active[static_cast<std::size_t>(i)] = 0;
      --s.active_rows;
    } else {
      s.a[static_cast<std::size_t>(i)] =
          ExtendedScalar::exp2_of(s.ax[static_cast<std::size_t>(i)] * s.log2a);
    }
  }
  refresh_total(s);
  s.maxima.reset(inst.system, s.active);
  if (s.active_rows == 0) return finish(s, SolveStatus::Solved);

  // lambda0 starts at max_i min_j w_j / (A_ij |a(x0)|): the cheapest way to
  // satisfy the hardest single row, spread over the initial credit mass.
  double maxmin = 0.0;
  for (std::int32_t i = 0; i < m; ++i) {
    if (!s.active[static_cast<std::size_t>(i)]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : inst.system.rows[static_cast<std::size_t>(i)].entries) {
      best = std::min(best, inst.costs[static_cast<std::size_t>(e.column)] / e.coef);
    }
    maxmin = std::max(maxmin, best);
  }
  s.lambda0 = ExtendedScalar::from_double(maxmin) / s.a_total;

  update_dual_bound(s);

  const double cap = options.scaling_cap_factor * s.u;
  const ExtendedScalar guard_mult = ExtendedScalar::from_double(1.0 + 4.0 * s.eps);

  for (;;) {
    bool done = false;
    for (std::int32_t j = 0; j < n && !done; ++j) {
      const auto& col = inst.system.columns[static_cast<std::size_t>(j)];
      ExtendedScalar credit = column_credit(s, j);
      s.counters.work_units += col.size();
      if (credit.is_zero()) continue;

      const ExtendedScalar guard = s.lambda0 * guard_mult;
      const ExtendedScalar w = ExtendedScalar::from_double(inst.costs[static_cast<std::size_t>(j)]);
      while (!credit.is_zero() && w <= guard * credit) {
        const double cmax = s.maxima.max_coef(j);
        const double step = 1.0 / cmax;  // max active row increase is exactly 1
        s.x[static_cast<std::size_t>(j)] += step;
        s.counters.increments++;
        s.diag.min_step = std::min(s.diag.min_step, step);

        const ExtendedScalar credit_before = credit;
        for (const auto& e : col) {
          const std::size_t i = static_cast<std::size_t>(e.row);
          if (!s.active[i]) continue;
          s.counters.work_units++;
          s.ax[i] += e.coef * step;
          ExtendedScalar fresh;
          if (s.ax[i] >= s.u) {
            s.active[i] = 0;
            --s.active_rows;
          } else {
            fresh = ExtendedScalar::exp2_of(s.ax[i] * s.log2a);
          }
          const ExtendedScalar delta = fresh - s.a[i];
          s.a[i] = fresh;
          s.a_total += delta;
          credit += delta * e.coef;
        }
        if (detail::sum_needs_refresh(credit_before, credit)) {
          credit = column_credit(s, j);
          refresh_total(s);
          s.counters.work_units += col.size();
        }

        if (hooks && hooks->on_increment) emit_event(s, j, step, hooks->on_increment);
        if (s.active_rows == 0) {
          done = true;
          break;
        }
      }
    }
    if (done) break;

    refresh_total(s);
    update_dual_bound(s);
    monitor_potential(s);
    if (hooks && hooks->on_scaling) emit_event(s, -1, 0.0, hooks->on_scaling);
    s.lambda0 *= (1.0 + s.eps);
    s.counters.scalings++;
    if (static_cast<double>(s.counters.scalings) > cap) {
      return finish(s, SolveStatus::IterationCapExceeded);
    }
  }
  return finish(s, SolveStatus::Solved);
}

double covering_dual_bound(const CoveringInstance& inst, std::span<const double> x_raw,
                           double eps, double u, ExtendedScalar* lambda_star_out) {
  const std::int32_t m = inst.rows();
  const std::int32_t n = inst.n();
  const double log2a = std::log2(1.0 - eps);
  std::vector<ExtendedScalar> a(static_cast<std::size_t>(m));
  ExtendedScalar a_total;
  for (std::int32_t i = 0; i < m; ++i) {
    double v = 0.0;
    for (const auto& e : inst.system.rows[static_cast<std::size_t>(i)].entries) {
      v += e.coef * x_raw[static_cast<std::size_t>(e.column)];
    }
    if (v < u) {
      a[static_cast<std::size_t>(i)] = ExtendedScalar::exp2_of(v * log2a);
      a_total += a[static_cast<std::size_t>(i)];
    }
  }
  bool any = false;
  ExtendedScalar lambda_star;
  for (std::int32_t j = 0; j < n; ++j) {
    ExtendedScalar credit;
    for (const auto& e : inst.system.columns[static_cast<std::size_t>(j)]) {
      credit += a[static_cast<std::size_t>(e.row)] * e.coef;
    }
    if (credit.is_zero()) continue;
    const ExtendedScalar lam =
        ExtendedScalar::from_double(inst.costs[static_cast<std::size_t>(j)]) / credit;
    if (!any || lam < lambda_star) {
      lambda_star = lam;
      any = true;
    }
  }
  if (!any) return 0.0;
  if (lambda_star_out) *lambda_star_out = lambda_star;
  return (a_total * lambda_star).to_double();
}

}  // namespace poslp
