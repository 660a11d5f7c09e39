#include "poslp/check.hpp"

#include <algorithm>
#include <cmath>

#include "poslp/covering.hpp"
#include "poslp/extended_scalar.hpp"
#include "poslp/facility_location.hpp"

namespace poslp {

namespace {

double row_value(const SparseRow& row, std::span<const double> x) {
  double v = 0.0;
  for (const auto& e : row.entries) v += e.coef * x[static_cast<std::size_t>(e.column)];
  return v;
}

}  // namespace

FeasibilityReport check_solution(const MixedInstance& inst, std::span<const double> x,
                                 double tolerance, double ratio_bound) {
  FeasibilityReport rep;
  if (static_cast<std::int32_t>(x.size()) != inst.n) {
    rep.message = "dimension mismatch";
    return rep;
  }
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      rep.message = "solution has negative or non-finite entries";
      return rep;
    }
  }
  for (std::int32_t j : inst.norm_log.fixed_columns) {
    if (x[static_cast<std::size_t>(j)] > tolerance) {
      rep.message = "variable " + std::to_string(j) + " pinned to zero by a rhs-0 packing row";
      return rep;
    }
  }
  rep.max_packing = 0.0;
  for (const auto& row : inst.packing.rows) {
    rep.max_packing = std::max(rep.max_packing, row_value(row, x));
  }
  for (const auto& row : inst.covering.rows) {
    rep.min_covering = std::min(rep.min_covering, row_value(row, x));
  }
  const bool cover_ok = rep.min_covering >= 1.0 - tolerance;
  const bool pack_ok = rep.max_packing <= 1.0 + ratio_bound;
  rep.pass = cover_ok && pack_ok;
  if (!cover_ok) rep.message = "covering violated: min row value " + std::to_string(rep.min_covering);
  else if (!pack_ok) rep.message = "packing violated: max row value " + std::to_string(rep.max_packing);
  return rep;
}

FeasibilityReport check_solution(const CoveringInstance& inst, std::span<const double> x,
                                 double tolerance) {
  FeasibilityReport rep;
  if (static_cast<std::int32_t>(x.size()) != inst.n()) {
    rep.message = "dimension mismatch";
    return rep;
  }
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      rep.message = "solution has negative or non-finite entries";
      return rep;
    }
  }
  for (const auto& row : inst.system.rows) {
    rep.min_covering = std::min(rep.min_covering, row_value(row, x));
  }
  rep.cost = 0.0;
  for (std::int32_t j = 0; j < inst.n(); ++j) {
    rep.cost += inst.costs[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  }
  rep.pass = rep.min_covering >= 1.0 - tolerance;
  if (!rep.pass) rep.message = "covering violated: min row value " + std::to_string(rep.min_covering);
  return rep;
}

FeasibilityReport check_solution(const FacilityInstance& inst, std::span<const double> x,
                                 std::span<const double> y, double tolerance) {
  FeasibilityReport rep;
  if (x.size() != inst.pairs.size() ||
      static_cast<std::int32_t>(y.size()) != inst.n_facilities) {
    rep.message = "dimension mismatch";
    return rep;
  }
  std::vector<double> coverage(static_cast<std::size_t>(inst.m_clients), 0.0);
  rep.cost = 0.0;
  for (std::size_t k = 0; k < inst.pairs.size(); ++k) {
    const auto& p = inst.pairs[k];
    if (!(x[k] >= 0.0)) {
      rep.message = "negative pair value";
      return rep;
    }
    if (x[k] > y[static_cast<std::size_t>(p.facility)] + tolerance * (1.0 + x[k])) {
      rep.message = "pair (" + std::to_string(p.client) + "," + std::to_string(p.facility) +
                    ") exceeds its facility opening";
      return rep;
    }
    coverage[static_cast<std::size_t>(p.client)] += x[k];
    rep.cost += p.cost * x[k];
  }
  for (std::int32_t j = 0; j < inst.n_facilities; ++j) {
    rep.cost += inst.open_cost[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
  }
  rep.min_covering = *std::min_element(coverage.begin(), coverage.end());
  rep.pass = rep.min_covering >= 1.0 - tolerance;
  if (!rep.pass) rep.message = "client coverage below 1: " + std::to_string(rep.min_covering);
  return rep;
}

namespace {

bool verify_fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

}  // namespace

bool verify_infeasibility_certificate(const MixedInstance& inst,
                                      const InfeasibilityCertificate& cert,
                                      std::string* why) {
  const std::int32_t n = inst.n;
  const std::int32_t mp = inst.packing_rows();
  const std::int32_t mc = inst.covering_rows();
  if (static_cast<std::int32_t>(cert.x.size()) != n ||
      static_cast<std::int32_t>(cert.packing_weights.size()) != mp ||
      static_cast<std::int32_t>(cert.covering_weights.size()) != mc ||
      static_cast<std::int32_t>(cert.margins.size()) != n) {
    return verify_fail(why, "certificate dimensions do not match the instance");
  }
  if (mp == 0 || mc == 0) return verify_fail(why, "certificate needs both systems nonempty");

  const double log2p = std::log2(1.0 + cert.epsilon);
  const double log2c = std::log2(1.0 - cert.epsilon);

  std::vector<ExtendedScalar> p(static_cast<std::size_t>(mp));
  std::vector<ExtendedScalar> c(static_cast<std::size_t>(mc));
  ExtendedScalar p_total, c_total;
  for (std::int32_t i = 0; i < mp; ++i) {
    const double v = row_value(inst.packing.rows[static_cast<std::size_t>(i)], cert.x);
    p[static_cast<std::size_t>(i)] = ExtendedScalar::exp2_of(v * log2p);
    p_total += p[static_cast<std::size_t>(i)];
  }
  std::int32_t active = 0;
  for (std::int32_t i = 0; i < mc; ++i) {
    const double v = row_value(inst.covering.rows[static_cast<std::size_t>(i)], cert.x);
    if (v < cert.u) {
      c[static_cast<std::size_t>(i)] = ExtendedScalar::exp2_of(v * log2c);
      c_total += c[static_cast<std::size_t>(i)];
      ++active;
    }
  }
  if (active == 0) return verify_fail(why, "all covering rows deactivated; nothing to certify");

  // Stored weight vectors must match the recomputation.
  for (std::int32_t i = 0; i < mp; ++i) {
    const double w = ExtendedScalar::ratio_as_double(p[static_cast<std::size_t>(i)], p_total);
    if (std::fabs(w - cert.packing_weights[static_cast<std::size_t>(i)]) > 1e-6 * (1.0 + w)) {
      return verify_fail(why, "stored packing weight " + std::to_string(i) + " inconsistent");
    }
  }
  for (std::int32_t i = 0; i < mc; ++i) {
    const double w = ExtendedScalar::ratio_as_double(c[static_cast<std::size_t>(i)], c_total);
    if (std::fabs(w - cert.covering_weights[static_cast<std::size_t>(i)]) > 1e-6 * (1.0 + w)) {
      return verify_fail(why, "stored covering weight " + std::to_string(i) + " inconsistent");
    }
  }

  for (std::int32_t j = 0; j < n; ++j) {
    ExtendedScalar pack_sum, cover_sum;
    for (const auto& e : inst.packing.columns[static_cast<std::size_t>(j)]) {
      pack_sum += p[static_cast<std::size_t>(e.row)] * e.coef;
    }
    for (const auto& e : inst.covering.columns[static_cast<std::size_t>(j)]) {
      cover_sum += c[static_cast<std::size_t>(e.row)] * e.coef;
    }
    if (cover_sum.is_zero()) continue;  // no active covering row uses j
    const double margin = ExtendedScalar::ratio_as_double(pack_sum, p_total) -
                          ExtendedScalar::ratio_as_double(cover_sum, c_total);
    if (!(margin > 0.0)) {
      return verify_fail(why, "column " + std::to_string(j) + " margin not strictly positive (" +
                                  std::to_string(margin) + ")");
    }
  }
  return true;
}

bool verify_cover_bound(const CoveringInstance& inst, const BoundWitness& witness,
                        std::string* why) {
  if (static_cast<std::int32_t>(witness.x_snapshot.size()) != inst.n()) {
    return verify_fail(why, "witness dimension mismatch");
  }
  ExtendedScalar lambda_star;
  const double recomputed =
      covering_dual_bound(inst, witness.x_snapshot, witness.epsilon, witness.u, &lambda_star);
  if (recomputed < witness.lower_bound * (1.0 - 1e-9)) {
    return verify_fail(why, "recomputed bound " + std::to_string(recomputed) +
                                " below claimed " + std::to_string(witness.lower_bound));
  }
  return true;
}

bool verify_fl_bound(const FacilityInstance& inst, const BoundWitness& witness,
                     std::string* why) {
  if (witness.x_snapshot.size() != inst.pairs.size()) {
    return verify_fail(why, "witness dimension mismatch");
  }
  ExtendedScalar lambda_star;
  const double star_route =
      fl_dual_bound(inst, witness.x_snapshot, witness.epsilon, witness.u, &lambda_star);
  // ell = max_i min_j (f_j + c_ij) is itself a valid bound: serving the
  // hardest client alone already costs that much.
  double ell = 0.0;
  for (std::int32_t i = 0; i < inst.m_clients; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::int32_t k : inst.client_pairs[static_cast<std::size_t>(i)]) {
      const auto& p = inst.pairs[static_cast<std::size_t>(k)];
      best = std::min(best, inst.open_cost[static_cast<std::size_t>(p.facility)] + p.cost);
    }
    ell = std::max(ell, best);
  }
  const double recomputed = std::max(star_route, ell);
  if (recomputed < witness.lower_bound * (1.0 - 1e-9)) {
    return verify_fail(why, "recomputed bound " + std::to_string(recomputed) +
                                " below claimed " + std::to_string(witness.lower_bound));
  }
  return true;
}

}  // namespace poslp
