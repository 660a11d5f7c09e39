#include "poslp/facility_location.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "poslp/parallel_runtime.hpp"

namespace poslp {

namespace {

// Clients with a free serving pair (f_j + c_ij = 0) are granted x_ij = y_j
// at full scale up front and leave the working LP; this sidesteps the
// division by f_j + c_ij in the multiplicative start.
struct FlPrep {
  double u = 0.0;
  double ell = 0.0;  // max over working clients of min_j (f_j + c_ij)
  std::vector<std::uint8_t> active;
  std::vector<std::int32_t> granted_pair;  // per client, -1 if none
  std::int32_t active_clients = 0;
};

FlPrep prepare(const FacilityInstance& inst, double eps) {
  FlPrep prep;
  prep.u = std::log(static_cast<double>(std::max(2, inst.m_clients))) / (eps * eps);
  prep.active.assign(static_cast<std::size_t>(inst.m_clients), 1);
  prep.granted_pair.assign(static_cast<std::size_t>(inst.m_clients), -1);
  for (std::int32_t i = 0; i < inst.m_clients; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::int32_t free_pair = -1;
    for (std::int32_t k : inst.client_pairs[static_cast<std::size_t>(i)]) {
      const auto& p = inst.pairs[static_cast<std::size_t>(k)];
      const double serve = inst.open_cost[static_cast<std::size_t>(p.facility)] + p.cost;
      if (serve < best) best = serve;
      if (serve == 0.0 && free_pair < 0) free_pair = k;
    }
    if (free_pair >= 0) {
      prep.active[static_cast<std::size_t>(i)] = 0;
      prep.granted_pair[static_cast<std::size_t>(i)] = free_pair;
    } else {
      prep.ell = std::max(prep.ell, best);
      prep.active_clients++;
    }
  }
  return prep;
}

// lambda* = min over facilities and stars, minimized per facility by a
// prefix scan in increasing c_ij / a_i order.
std::optional<ExtendedScalar> lambda_star_over_stars(const FacilityInstance& inst,
                                                     std::span<const ExtendedScalar> a) {
  std::optional<ExtendedScalar> best;
  std::vector<std::pair<double, ExtendedScalar>> cand;
  for (std::int32_t j = 0; j < inst.n_facilities; ++j) {
    cand.clear();
    for (std::int32_t k : inst.facility_pairs[static_cast<std::size_t>(j)]) {
      const auto& p = inst.pairs[static_cast<std::size_t>(k)];
      if (!a[static_cast<std::size_t>(p.client)].is_zero()) {
        cand.push_back({p.cost, a[static_cast<std::size_t>(p.client)]});
      }
    }
    if (cand.empty()) continue;
    std::stable_sort(cand.begin(), cand.end(), [](const auto& lhs, const auto& rhs) {
      // c1/a1 < c2/a2 without forming the ratios
      return ExtendedScalar::from_double(lhs.first) * rhs.second <
             ExtendedScalar::from_double(rhs.first) * lhs.second;
    });
    double cost = inst.open_cost[static_cast<std::size_t>(j)];
    ExtendedScalar credit;
    for (const auto& [c, ai] : cand) {
      cost += c;
      credit += ai;
      const ExtendedScalar lam = ExtendedScalar::from_double(cost) / credit;
      if (!best || lam < *best) best = lam;
    }
  }
  return best;
}

struct FlCommonState {
  const FacilityInstance* inst = nullptr;
  double eps = 0.0, u = 0.0, log2a = 0.0;
  FlPrep prep;

  std::vector<double> x;  // per pair
  std::vector<double> y;  // per facility
  std::vector<double> cov;
  std::vector<ExtendedScalar> a;
  std::int32_t active_clients = 0;

  ExtendedScalar lambda0;
  double best_bound = 0.0;
  BoundWitness witness;

  SolveCounters counters;
  SolveDiagnostics diag;

  void set_credit(std::size_t i) {
    a[i] = prep.active[i] && cov[i] < u ? ExtendedScalar::exp2_of(cov[i] * log2a)
                                        : ExtendedScalar{};
  }
  ExtendedScalar credit_total() const {
    ExtendedScalar t;
    for (const auto& v : a) t += v;
    return t;
  }
  void update_bound() {
    const auto lam = lambda_star_over_stars(*inst, a);
    if (!lam) return;
    const double bound = (credit_total() * *lam).to_double();
    if (bound > best_bound) {
      best_bound = bound;
      witness.lower_bound = bound;
      witness.x_snapshot = x;
      witness.lambda_star_mantissa = lam->mantissa();
      witness.lambda_star_exp2 = lam->exponent();
    }
  }
};

void emit_fl_event(const FlCommonState& s, FlEvent::Kind kind, std::int32_t facility, double z,
                   std::span<const std::uint8_t> active_like,
                   std::span<const std::uint8_t> in_j,
                   const std::function<void(const FlEvent&)>& fn) {
  FlEvent ev;
  ev.kind = kind;
  ev.facility = facility;
  ev.z = z;
  ev.u = s.u;
  ev.lambda0 = s.lambda0;
  ev.x_pairs = s.x;
  ev.y = s.y;
  ev.coverage = s.cov;
  ev.client_active = active_like;
  ev.in_active_set = in_j;
  ev.best_lower_bound = s.best_bound;
  fn(ev);
}

SolveReport fl_finish(FlCommonState& s, SolveStatus status) {
  SolveReport report;
  report.status = status;
  report.x.resize(s.x.size());
  for (std::size_t k = 0; k < s.x.size(); ++k) report.x[k] = s.x[k] / s.u;
  report.y.resize(s.y.size());
  for (std::size_t j = 0; j < s.y.size(); ++j) report.y[j] = s.y[j] / s.u;
  // Granted clients ride along at full scale on their free pair.
  for (std::int32_t i = 0; i < s.inst->m_clients; ++i) {
    const std::int32_t k = s.prep.granted_pair[static_cast<std::size_t>(i)];
    if (k < 0) continue;
    const auto& p = s.inst->pairs[static_cast<std::size_t>(k)];
    report.x[static_cast<std::size_t>(k)] = 1.0;
    report.y[static_cast<std::size_t>(p.facility)] =
        std::max(report.y[static_cast<std::size_t>(p.facility)], 1.0);
  }
  double cost = 0.0;
  for (std::size_t k = 0; k < report.x.size(); ++k) {
    cost += s.inst->pairs[k].cost * report.x[k];
  }
  for (std::size_t j = 0; j < report.y.size(); ++j) {
    cost += s.inst->open_cost[j] * report.y[j];
  }
  report.cost = cost;
  report.lower_bound = std::max(s.best_bound, s.prep.ell);
  if (report.lower_bound > 0.0) {
    s.witness.epsilon = s.eps;
    s.witness.u = s.u;
    s.witness.lower_bound = report.lower_bound;
    if (s.witness.x_snapshot.empty()) s.witness.x_snapshot = s.x;
    report.bound = s.witness;
  }
  report.counters = s.counters;
  report.diagnostics = s.diag;
  return report;
}

}  // namespace

Star best_star(const FacilityInstance& inst, std::int32_t facility,
               const ExtendedScalar& threshold, std::span<const ExtendedScalar> a) {
  Star star;
  double cost = inst.open_cost[static_cast<std::size_t>(facility)];
  for (std::int32_t k : inst.facility_pairs[static_cast<std::size_t>(facility)]) {
    const auto& p = inst.pairs[static_cast<std::size_t>(k)];
    const auto& ai = a[static_cast<std::size_t>(p.client)];
    if (ai.is_zero()) continue;
    if (ExtendedScalar::from_double(p.cost) < threshold * ai) {
      star.pair_ids.push_back(k);
      cost += p.cost;
      star.credit_sum += ai;
    }
  }
  star.cost_sum = cost;
  if (!star.credit_sum.is_zero()) {
    star.lambda = ExtendedScalar::from_double(cost) / star.credit_sum;
  }
  return star;
}

void top_up(const FacilityInstance& inst, const ExtendedScalar& lambda0, double eps, double u,
            std::span<double> x_pairs, std::span<const double> y, std::span<double> coverage,
            std::span<ExtendedScalar> a, std::span<std::uint8_t> client_active,
            std::int32_t* active_clients, std::uint64_t* pairs_touched) {
  const double log2a = std::log2(1.0 - eps);
  const double ln1a = std::log1p(-eps);
  const double lambda0_ln = lambda0.is_zero() ? 0.0 : lambda0.ln_abs();
  std::uint64_t touched = 0;
  for (std::int32_t i = 0; i < inst.m_clients; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    if (!client_active[ii]) continue;
    const double base = coverage[ii];
    double d_excl = 0.0;   // prefix of slacks in increasing-cost order
    double raised = 0.0;   // what this client actually gained
    for (std::int32_t k : inst.client_pairs[ii]) {
      ++touched;
      const auto& p = inst.pairs[static_cast<std::size_t>(k)];
      const std::size_t kk = static_cast<std::size_t>(k);
      const double slack = std::max(0.0, y[static_cast<std::size_t>(p.facility)] - x_pairs[kk]);
      if (slack == 0.0) continue;
      const double d_incl = d_excl + slack;
      const ExtendedScalar cost_es = ExtendedScalar::from_double(p.cost);
      double delta = 0.0;
      if (cost_es < lambda0 * ExtendedScalar::exp2_of((base + d_incl) * log2a)) {
        delta = slack;  // still cheap even after every earlier pair fills up
      } else if (cost_es < lambda0 * ExtendedScalar::exp2_of((base + d_excl) * log2a)) {
        // Boundary: raise until c_ij = lambda0 (1-eps)^(A_i x + d + delta).
        delta = (std::log(p.cost) - lambda0_ln) / ln1a - base - d_excl;
        delta = std::clamp(delta, 0.0, slack);
      }
      x_pairs[kk] += delta;
      raised += delta;
      d_excl = d_incl;
    }
    if (raised > 0.0) {
      coverage[ii] += raised;
      if (coverage[ii] >= u) {
        client_active[ii] = 0;
        a[ii] = ExtendedScalar{};
        if (active_clients) --(*active_clients);
      } else {
        a[ii] = ExtendedScalar::exp2_of(coverage[ii] * log2a);
      }
    }
  }
  if (pairs_touched) *pairs_touched += touched;
}

std::uint64_t count_topup_violations(const FacilityInstance& inst, const ExtendedScalar& lambda0,
                                     std::span<const double> x_pairs, std::span<const double> y,
                                     std::span<const ExtendedScalar> a) {
  std::uint64_t violations = 0;
  for (std::size_t k = 0; k < inst.pairs.size(); ++k) {
    const auto& p = inst.pairs[k];
    const auto& ai = a[static_cast<std::size_t>(p.client)];
    if (ai.is_zero()) continue;
    if (ExtendedScalar::from_double(p.cost) < lambda0 * ai) {
      const double yj = y[static_cast<std::size_t>(p.facility)];
      if (x_pairs[k] < yj - 1e-9 * (1.0 + yj)) ++violations;
    }
  }
  return violations;
}

SolveReport solve_fl_sequential(const FacilityInstance& inst, const FlOptions& options,
                                const FlHooks* hooks) {
  require_epsilon(options.epsilon);
  if (auto v = validate(inst); !v.ok) {
    throw std::invalid_argument("solve_fl_sequential: " + v.message);
  }

  FlCommonState s;
  s.inst = &inst;
  s.eps = options.epsilon;
  s.log2a = std::log2(1.0 - s.eps);
  s.prep = prepare(inst, s.eps);
  s.u = s.prep.u;
  s.diag.u = s.u;
  s.x.assign(inst.pairs.size(), 0.0);
  s.y.assign(static_cast<std::size_t>(inst.n_facilities), 0.0);
  s.cov.assign(static_cast<std::size_t>(inst.m_clients), 0.0);
  s.a.resize(static_cast<std::size_t>(inst.m_clients));
  for (std::size_t i = 0; i < s.a.size(); ++i) s.set_credit(i);
  s.active_clients = s.prep.active_clients;
  if (s.active_clients == 0) return fl_finish(s, SolveStatus::Solved);

  s.lambda0 = ExtendedScalar::from_double(s.prep.ell) / s.credit_total();
  s.update_bound();

  const double cap = options.scaling_cap_factor * s.u;
  std::vector<std::int32_t> star;  // member pair ids of the running facility

  for (;;) {
    for (std::int32_t j = 0; j < inst.n_facilities; ++j) {
      const ExtendedScalar thr = s.lambda0 * (1.0 + s.eps);
      const std::size_t jj = static_cast<std::size_t>(j);
      // Fresh canonical star for this run.
      star.clear();
      double cost_sum = inst.open_cost[jj];
      ExtendedScalar credit;
      for (std::int32_t k : inst.facility_pairs[jj]) {
        const auto& p = inst.pairs[static_cast<std::size_t>(k)];
        const auto& ai = s.a[static_cast<std::size_t>(p.client)];
        if (ai.is_zero()) continue;
        if (ExtendedScalar::from_double(p.cost) < thr * ai) {
          star.push_back(k);
          cost_sum += p.cost;
          credit += ai;
        }
      }
      s.counters.work_units += inst.facility_pairs[jj].size();

      while (!credit.is_zero() && ExtendedScalar::from_double(cost_sum) <= thr * credit) {
        // Increment: open one unit of j and serve the whole star.
        s.y[jj] += 1.0;
        s.counters.increments++;
        s.counters.work_units += star.size();
        for (std::int32_t k : star) {
          const std::size_t kk = static_cast<std::size_t>(k);
          const auto& p = inst.pairs[kk];
          const std::size_t ii = static_cast<std::size_t>(p.client);
          s.x[kk] += 1.0;
          s.cov[ii] += 1.0;
          if (s.cov[ii] >= s.u) {
            s.prep.active[ii] = 0;
            s.a[ii] = ExtendedScalar{};
            --s.active_clients;
          } else {
            s.a[ii] = ExtendedScalar::exp2_of(s.cov[ii] * s.log2a);
          }
        }
        // Members whose price credit fell out of range leave the star.
        std::size_t keep = 0;
        cost_sum = inst.open_cost[jj];
        credit = ExtendedScalar{};
        for (std::int32_t k : star) {
          const auto& p = inst.pairs[static_cast<std::size_t>(k)];
          const auto& ai = s.a[static_cast<std::size_t>(p.client)];
          if (ai.is_zero()) continue;
          if (!(ExtendedScalar::from_double(p.cost) < thr * ai)) continue;
          star[keep++] = k;
          cost_sum += p.cost;
          credit += ai;
        }
        star.resize(keep);

        if (hooks && hooks->on_increment) {
          emit_fl_event(s, FlEvent::Kind::Increment, j, 1.0, s.prep.active, {}, hooks->on_increment);
        }
        if (s.active_clients == 0) return fl_finish(s, SolveStatus::Solved);
      }
    }

    s.update_bound();
    if (hooks && hooks->on_scaling) {
      emit_fl_event(s, FlEvent::Kind::Scaling, -1, 0.0, s.prep.active, {}, hooks->on_scaling);
    }
    s.lambda0 *= (1.0 + s.eps);
    s.counters.scalings++;
    if (static_cast<double>(s.counters.scalings) > cap) {
      return fl_finish(s, SolveStatus::IterationCapExceeded);
    }
  }
}

SolveReport solve_fl_parallel(const FacilityInstance& inst, const FlOptions& options,
                              const FlHooks* hooks) {
  require_epsilon(options.epsilon);
  if (auto v = validate(inst); !v.ok) {
    throw std::invalid_argument("solve_fl_parallel: " + v.message);
  }

  FlCommonState s;
  s.inst = &inst;
  s.eps = options.epsilon;
  s.log2a = std::log2(1.0 - s.eps);
  s.prep = prepare(inst, s.eps);
  s.u = s.prep.u;
  s.diag.u = s.u;
  const std::size_t np = inst.pairs.size();
  const std::size_t nf = static_cast<std::size_t>(inst.n_facilities);
  const std::size_t mc = static_cast<std::size_t>(inst.m_clients);
  s.x.assign(np, 0.0);
  s.y.assign(nf, 0.0);
  s.cov.assign(mc, 0.0);
  s.a.resize(mc);
  s.active_clients = s.prep.active_clients;

  ParallelRuntime pool(options.threads);

  if (s.active_clients == 0) {
    for (std::size_t i = 0; i < mc; ++i) s.set_credit(i);
    return fl_finish(s, SolveStatus::Solved);
  }

  // Multiplicative start: a sliver of every pair, sized by its serve cost.
  const double denom = static_cast<double>(inst.n_facilities) * static_cast<double>(inst.m_clients);
  pool.for_chunks(np, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto& p = inst.pairs[k];
      if (!s.prep.active[static_cast<std::size_t>(p.client)]) continue;
      const double serve = inst.open_cost[static_cast<std::size_t>(p.facility)] + p.cost;
      s.x[k] = s.eps * s.prep.ell / (serve * denom);
    }
  });
  pool.for_chunks(nf, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      double sum = 0.0;
      for (std::int32_t k : inst.facility_pairs[j]) sum += s.x[static_cast<std::size_t>(k)];
      s.y[j] = sum;
    }
  });
  pool.for_chunks(mc, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double sum = 0.0;
      for (std::int32_t k : inst.client_pairs[i]) sum += s.x[static_cast<std::size_t>(k)];
      s.cov[i] = sum;
      s.set_credit(i);
    }
  });
  s.counters.work_units += 3 * np;

  s.lambda0 = ExtendedScalar::from_double(s.prep.ell) / s.credit_total();
  s.update_bound();

  const double cap = options.scaling_cap_factor * s.u;

  std::vector<ExtendedScalar> thr(mc);                  // lambda0 * a_i
  std::vector<std::vector<std::int32_t>> star_lists(nf);
  std::vector<std::vector<std::int32_t>> client_lists(mc);
  std::vector<std::uint8_t> in_j(nf, 0);
  std::vector<std::int32_t> live_facilities, live_clients;
  std::vector<double> w(mc, 0.0);
  std::vector<double> bump(nf, 0.0);
  std::atomic<std::uint64_t> work{0};

  for (;;) {
    // Phase: rescale, top up, then batched increments until J empties.
    s.update_bound();
    if (hooks && hooks->on_scaling) {
      emit_fl_event(s, FlEvent::Kind::Scaling, -1, 0.0, s.prep.active, in_j, hooks->on_scaling);
    }
    s.lambda0 *= (1.0 + s.eps);
    s.counters.scalings++;
    if (static_cast<double>(s.counters.scalings) > cap) {
      s.counters.work_units += work.load();
      work = 0;
      return fl_finish(s, SolveStatus::IterationCapExceeded);
    }

    // Per-client top-up (independent clients, deterministic per client).
    {
      std::atomic<std::int64_t> deact{0};
      const double ln1a = std::log1p(-s.eps);
      const double lambda0_ln = s.lambda0.is_zero() ? 0.0 : s.lambda0.ln_abs();
      pool.for_chunks(mc, [&](std::size_t, std::size_t b, std::size_t e) {
        std::uint64_t t = 0;
        std::int64_t d = 0;
        for (std::size_t i = b; i < e; ++i) {
          if (!s.prep.active[i]) continue;
          const double base = s.cov[i];
          double d_excl = 0.0, raised = 0.0;
          for (std::int32_t k : inst.client_pairs[i]) {
            ++t;
            const auto& p = inst.pairs[static_cast<std::size_t>(k)];
            const std::size_t kk = static_cast<std::size_t>(k);
            const double slack =
                std::max(0.0, s.y[static_cast<std::size_t>(p.facility)] - s.x[kk]);
            if (slack == 0.0) continue;
            const double d_incl = d_excl + slack;
            const ExtendedScalar cost_es = ExtendedScalar::from_double(p.cost);
            double delta = 0.0;
            if (cost_es < s.lambda0 * ExtendedScalar::exp2_of((base + d_incl) * s.log2a)) {
              delta = slack;
            } else if (cost_es < s.lambda0 * ExtendedScalar::exp2_of((base + d_excl) * s.log2a)) {
              delta = (std::log(p.cost) - lambda0_ln) / ln1a - base - d_excl;
              delta = std::clamp(delta, 0.0, slack);
            }
            s.x[kk] += delta;
            raised += delta;
            d_excl = d_incl;
          }
          if (raised > 0.0) {
            s.cov[i] += raised;
            if (s.cov[i] >= s.u) {
              s.prep.active[i] = 0;
              s.a[i] = ExtendedScalar{};
              ++d;
            } else {
              s.a[i] = ExtendedScalar::exp2_of(s.cov[i] * s.log2a);
            }
          }
        }
        work += t;
        deact += d;
      });
      s.active_clients -= static_cast<std::int32_t>(deact.load());
    }
    if (options.verify_topup) {
      s.diag.topup_violations += count_topup_violations(inst, s.lambda0, s.x, s.y, s.a);
    }
    if (hooks && hooks->on_topup) {
      emit_fl_event(s, FlEvent::Kind::TopUp, -1, 0.0, s.prep.active, in_j, hooks->on_topup);
    }
    if (s.active_clients == 0) {
      s.counters.work_units += work.load();
      work = 0;
      return fl_finish(s, SolveStatus::Solved);
    }

    // Inner loop setup: thresholds, stars, and J from scratch.
    pool.for_chunks(mc, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) thr[i] = s.lambda0 * s.a[i];
    });
    std::atomic<std::int64_t> j_count{0};
    pool.for_chunks(nf, [&](std::size_t, std::size_t b, std::size_t e) {
      std::uint64_t t = 0;
      std::int64_t here = 0;
      for (std::size_t j = b; j < e; ++j) {
        auto& lst = star_lists[j];
        lst.clear();
        in_j[j] = 0;
        double cost_sum = inst.open_cost[j];
        ExtendedScalar credit;
        for (std::int32_t k : inst.facility_pairs[j]) {
          ++t;
          const auto& p = inst.pairs[static_cast<std::size_t>(k)];
          const std::size_t ii = static_cast<std::size_t>(p.client);
          if (s.a[ii].is_zero()) continue;
          if (ExtendedScalar::from_double(p.cost) < thr[ii]) {
            lst.push_back(k);
            cost_sum += p.cost;
            credit += s.a[ii];
          }
        }
        if (!credit.is_zero() &&
            ExtendedScalar::from_double(cost_sum) <= s.lambda0 * credit) {
          in_j[j] = 1;
          ++here;
        }
      }
      work += t;
      j_count += here;
    });
    std::int64_t live_j = j_count.load();
    if (live_j == 0) continue;  // next phase

    pool.for_chunks(mc, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        auto& lst = client_lists[i];
        lst.clear();
        if (!s.prep.active[i]) continue;
        for (std::int32_t k : inst.client_pairs[i]) {
          const auto& p = inst.pairs[static_cast<std::size_t>(k)];
          if (!in_j[static_cast<std::size_t>(p.facility)]) continue;
          if (ExtendedScalar::from_double(p.cost) < thr[static_cast<std::size_t>(p.client)]) {
            lst.push_back(k);
          }
        }
      }
    });
    live_facilities.clear();
    for (std::size_t j = 0; j < nf; ++j) {
      if (in_j[j]) live_facilities.push_back(static_cast<std::int32_t>(j));
    }
    live_clients.clear();
    for (std::size_t i = 0; i < mc; ++i) {
      if (!client_lists[i].empty()) live_clients.push_back(static_cast<std::int32_t>(i));
    }

    std::vector<double> chunk_max(ParallelRuntime::chunk_count(live_clients.size()), 0.0);
    while (live_j > 0) {
      // Half-step 1 (clients): w_i = sum of y_j over live star memberships.
      pool.for_chunks(live_clients.size(), [&](std::size_t chunk, std::size_t b, std::size_t e) {
        std::uint64_t t = 0;
        double mx = 0.0;
        for (std::size_t q = b; q < e; ++q) {
          const std::size_t i = static_cast<std::size_t>(live_clients[q]);
          auto& lst = client_lists[i];
          if (s.a[i].is_zero()) {
            lst.clear();
            w[i] = 0.0;
            continue;
          }
          double sum = 0.0;
          std::size_t keep = 0;
          for (std::int32_t k : lst) {
            const auto& p = inst.pairs[static_cast<std::size_t>(k)];
            if (!in_j[static_cast<std::size_t>(p.facility)]) continue;
            if (!(ExtendedScalar::from_double(p.cost) < thr[i])) continue;
            lst[keep++] = k;
            sum += s.y[static_cast<std::size_t>(p.facility)];
          }
          lst.resize(keep);
          t += keep;
          w[i] = sum;
          mx = std::max(mx, sum);
        }
        work += t;
        chunk_max[chunk] = mx;
      });
      double wmax = 0.0;
      for (std::size_t c = 0; c < chunk_max.size(); ++c) wmax = std::max(wmax, chunk_max[c]);
      if (wmax == 0.0) break;

      const double z = 1.0 / wmax;
      s.counters.increments++;
      s.diag.min_step = std::min(s.diag.min_step, z);

      // Half-step 2 (facilities): grow y by z*y for members of J.
      pool.for_chunks(live_facilities.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
          const std::size_t j = static_cast<std::size_t>(live_facilities[q]);
          if (!in_j[j]) continue;
          bump[j] = z * s.y[j];
          s.y[j] += bump[j];
        }
      });

      // Half-step 3 (clients): x rides along; coverage and credits update.
      std::atomic<std::int64_t> deact{0};
      pool.for_chunks(live_clients.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        std::uint64_t t = 0;
        std::int64_t d = 0;
        for (std::size_t q = b; q < e; ++q) {
          const std::size_t i = static_cast<std::size_t>(live_clients[q]);
          const auto& lst = client_lists[i];
          if (lst.empty()) continue;
          for (std::int32_t k : lst) {
            const auto& p = inst.pairs[static_cast<std::size_t>(k)];
            s.x[static_cast<std::size_t>(k)] += bump[static_cast<std::size_t>(p.facility)];
          }
          t += lst.size();
          s.cov[i] += z * w[i];
          if (s.cov[i] >= s.u) {
            s.prep.active[i] = 0;
            s.a[i] = ExtendedScalar{};
            thr[i] = ExtendedScalar{};
            ++d;
          } else {
            s.a[i] = ExtendedScalar::exp2_of(s.cov[i] * s.log2a);
            thr[i] = s.lambda0 * s.a[i];
          }
        }
        work += t;
        deact += d;
      });
      s.active_clients -= static_cast<std::int32_t>(deact.load());

      // Half-step 4 (facilities): refresh star prices, shrink J.
      std::atomic<std::int64_t> removed{0};
      pool.for_chunks(live_facilities.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        std::uint64_t t = 0;
        std::int64_t rm = 0;
        for (std::size_t q = b; q < e; ++q) {
          const std::size_t j = static_cast<std::size_t>(live_facilities[q]);
          if (!in_j[j]) continue;
          auto& lst = star_lists[j];
          double cost_sum = inst.open_cost[j];
          ExtendedScalar credit;
          std::size_t keep = 0;
          for (std::int32_t k : lst) {
            const auto& p = inst.pairs[static_cast<std::size_t>(k)];
            const std::size_t ii = static_cast<std::size_t>(p.client);
            if (s.a[ii].is_zero()) continue;
            if (!(ExtendedScalar::from_double(p.cost) < thr[ii])) continue;
            lst[keep++] = k;
            cost_sum += p.cost;
            credit += s.a[ii];
          }
          lst.resize(keep);
          t += keep;
          if (credit.is_zero() ||
              !(ExtendedScalar::from_double(cost_sum) <= s.lambda0 * credit)) {
            in_j[j] = 0;
            ++rm;
          }
        }
        work += t;
        removed += rm;
      });
      live_j -= removed.load();

      if (hooks && hooks->on_increment) {
        emit_fl_event(s, FlEvent::Kind::Increment, -1, z, s.prep.active, in_j,
                      hooks->on_increment);
      }
      if (s.active_clients == 0) {
        s.counters.work_units += work.load();
        work = 0;
        return fl_finish(s, SolveStatus::Solved);
      }
    }
    s.counters.work_units += work.load();
    work = 0;
  }
}

CoveringInstance hochbaum_expand(const FacilityInstance& inst, std::vector<StarLabel>* labels) {
  if (inst.m_clients > 12) {
    throw std::invalid_argument("hochbaum_expand: refusing more than 12 clients");
  }
  CoveringInstance cover;
  cover.system.rows.assign(static_cast<std::size_t>(inst.m_clients), SparseRow{1.0, {}});
  if (labels) labels->clear();
  std::int32_t column = 0;
  for (std::int32_t j = 0; j < inst.n_facilities; ++j) {
    const auto& adj = inst.facility_pairs[static_cast<std::size_t>(j)];
    const std::uint32_t subsets = 1u << adj.size();
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
      double cost = inst.open_cost[static_cast<std::size_t>(j)];
      std::uint32_t member_mask = 0;
      for (std::size_t b = 0; b < adj.size(); ++b) {
        if (!(mask & (1u << b))) continue;
        const auto& p = inst.pairs[static_cast<std::size_t>(adj[b])];
        cost += p.cost;
        member_mask |= 1u << p.client;
        cover.system.rows[static_cast<std::size_t>(p.client)].entries.push_back({column, 1.0});
      }
      cover.costs.push_back(cost);
      if (labels) labels->push_back({j, member_mask});
      ++column;
    }
  }
  cover.system.n = column;
  cover.system.build_column_index();
  cover.normalized = true;
  return cover;
}

void hochbaum_lift(const FacilityInstance& inst, std::span<const StarLabel> labels,
                   std::span<const double> star_values, std::vector<double>& x_pairs,
                   std::vector<double>& y) {
  x_pairs.assign(inst.pairs.size(), 0.0);
  y.assign(static_cast<std::size_t>(inst.n_facilities), 0.0);
  // (client, facility) -> pair id
  std::vector<std::vector<std::int32_t>> lookup(static_cast<std::size_t>(inst.m_clients));
  for (auto& row : lookup) row.assign(static_cast<std::size_t>(inst.n_facilities), -1);
  for (std::size_t k = 0; k < inst.pairs.size(); ++k) {
    lookup[static_cast<std::size_t>(inst.pairs[k].client)]
          [static_cast<std::size_t>(inst.pairs[k].facility)] = static_cast<std::int32_t>(k);
  }
  for (std::size_t col = 0; col < labels.size(); ++col) {
    if (star_values[col] == 0.0) continue;
    const auto& label = labels[col];
    for (std::int32_t i = 0; i < inst.m_clients; ++i) {
      if (!(label.member_mask & (1u << i))) continue;
      const std::int32_t k = lookup[static_cast<std::size_t>(i)][static_cast<std::size_t>(label.facility)];
      x_pairs[static_cast<std::size_t>(k)] += star_values[col];
    }
  }
  for (std::size_t k = 0; k < inst.pairs.size(); ++k) {
    const std::size_t j = static_cast<std::size_t>(inst.pairs[k].facility);
    y[j] = std::max(y[j], x_pairs[k]);
  }
}

double fl_dual_bound(const FacilityInstance& inst, std::span<const double> x_pairs_raw,
                     double eps, double u, ExtendedScalar* lambda_star) {
  const double log2a = std::log2(1.0 - eps);
  std::vector<double> cov(static_cast<std::size_t>(inst.m_clients), 0.0);
  for (std::size_t k = 0; k < inst.pairs.size(); ++k) {
    cov[static_cast<std::size_t>(inst.pairs[k].client)] += x_pairs_raw[k];
  }
  std::vector<ExtendedScalar> a(static_cast<std::size_t>(inst.m_clients));
  ExtendedScalar total;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (cov[i] < u) {
      a[i] = ExtendedScalar::exp2_of(cov[i] * log2a);
      total += a[i];
    }
  }
  const auto lam = lambda_star_over_stars(inst, a);
  if (!lam) return 0.0;
  if (lambda_star) *lambda_star = *lam;
  return (total * *lam).to_double();
}

}  // namespace poslp
