#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "poslp/extended_scalar.hpp"
#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp::detail {

// Incrementally patched nonnegative sums need a from-scratch rebuild when a
// subtraction removes nearly all of the magnitude (what remains would be
// rounding noise) or drives the value negative.
inline bool sum_needs_refresh(const ExtendedScalar& before, const ExtendedScalar& after) {
  if (after.sign() < 0) return true;
  if (before.is_zero()) return false;
  if (after.is_zero()) return true;
  return before.log2_abs() - after.log2_abs() > 20.0;
}

// Margin test behind the infeasibility certificate, shared by the three
// mixed solvers.  p and c must be the exact exponentials at iterate x
// (c zeroed for deactivated rows).  Columns with zero covering credit are
// exempt: they cannot cover any active row.
inline std::optional<InfeasibilityCertificate> margins_certificate(
    const MixedInstance& inst, double eps, double u, std::span<const double> x,
    std::span<const ExtendedScalar> p, std::span<const ExtendedScalar> c,
    std::span<const std::uint8_t> c_active) {
  const std::int32_t mp = inst.packing_rows();
  const std::int32_t mc = inst.covering_rows();
  if (mp == 0 || mc == 0) return std::nullopt;

  ExtendedScalar p_total, c_total;
  for (std::int32_t i = 0; i < mp; ++i) p_total += p[static_cast<std::size_t>(i)];
  for (std::int32_t i = 0; i < mc; ++i) {
    if (c_active[static_cast<std::size_t>(i)]) c_total += c[static_cast<std::size_t>(i)];
  }
  if (c_total.is_zero()) return std::nullopt;

  std::vector<double> margins(static_cast<std::size_t>(inst.n));
  for (std::int32_t j = 0; j < inst.n; ++j) {
    ExtendedScalar pack_sum, cover_sum;
    for (const auto& e : inst.packing.columns[static_cast<std::size_t>(j)]) {
      pack_sum += p[static_cast<std::size_t>(e.row)] * e.coef;
    }
    for (const auto& e : inst.covering.columns[static_cast<std::size_t>(j)]) {
      if (c_active[static_cast<std::size_t>(e.row)]) {
        cover_sum += c[static_cast<std::size_t>(e.row)] * e.coef;
      }
    }
    const double margin = ExtendedScalar::ratio_as_double(pack_sum, p_total) -
                          ExtendedScalar::ratio_as_double(cover_sum, c_total);
    margins[static_cast<std::size_t>(j)] = margin;
    if (!cover_sum.is_zero() && !(margin > 0.0)) return std::nullopt;
  }

  InfeasibilityCertificate cert;
  cert.epsilon = eps;
  cert.u = u;
  cert.x.assign(x.begin(), x.end());
  cert.margins = std::move(margins);
  cert.packing_weights.resize(static_cast<std::size_t>(mp));
  for (std::int32_t i = 0; i < mp; ++i) {
    cert.packing_weights[static_cast<std::size_t>(i)] =
        ExtendedScalar::ratio_as_double(p[static_cast<std::size_t>(i)], p_total);
  }
  cert.covering_weights.resize(static_cast<std::size_t>(mc));
  for (std::int32_t i = 0; i < mc; ++i) {
    cert.covering_weights[static_cast<std::size_t>(i)] =
        c_active[static_cast<std::size_t>(i)]
            ? ExtendedScalar::ratio_as_double(c[static_cast<std::size_t>(i)], c_total)
            : 0.0;
  }
  return cert;
}

// Report-only coupled potential between lmin c(x) and lmax p(x), with the
// unspecified O(eps) constants pinned at 6 eps.
inline bool potential_violated(double eps, double m, double u, double max_px0,
                               const ExtendedScalar& p_total, const ExtendedScalar& c_total) {
  if (p_total.is_zero()) return false;
  const double ln1c = std::log1p(-eps);
  const double ln1p = std::log1p(eps);
  const double lmin_c = c_total.is_zero() ? u : c_total.ln_abs() / ln1c;
  const double lmax_p = p_total.ln_abs() / ln1p;
  const double lhs = (1.0 + 6.0 * eps) * lmin_c - std::log(m) / ln1c;
  const double rhs = (1.0 - 6.0 * eps) * (lmax_p - max_px0 / eps - std::log(m) / ln1p);
  return lhs < rhs - 1e-9 * (std::fabs(lhs) + std::fabs(rhs) + 1.0);
}

}  // namespace poslp::detail
