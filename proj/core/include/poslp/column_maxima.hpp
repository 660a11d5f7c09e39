#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poslp/instance.hpp"

namespace poslp {

// Largest coefficient among still-active rows of each column, for systems
// whose rows deactivate monotonically.  Columns are presorted by decreasing
// coefficient, so a per-column cursor that skips dead rows gives each
// query amortized constant time; every cursor advance is charged to one
// nonzero.
class ActiveColumnMaxima {
 public:
  ActiveColumnMaxima() = default;

  void reset(const SparseConstraintSystem& sys, std::span<const std::uint8_t> row_active) {
    sys_ = &sys;
    row_active_ = row_active;
    heads_.assign(sys.columns.size(), 0);
  }

  // Maximum active coefficient in column j, or 0 when no active row remains.
  double max_coef(std::int32_t j) {
    const auto& col = sys_->columns[static_cast<std::size_t>(j)];
    auto& head = heads_[static_cast<std::size_t>(j)];
    while (head < col.size() && row_active_[static_cast<std::size_t>(col[head].row)] == 0) {
      ++head;
    }
    return head < col.size() ? col[head].coef : 0.0;
  }

  bool column_exhausted(std::int32_t j) { return max_coef(j) == 0.0; }

 private:
  const SparseConstraintSystem* sys_ = nullptr;
  std::span<const std::uint8_t> row_active_;
  std::vector<std::size_t> heads_;
};

// Static per-column maximum (packing side never deactivates).
inline double static_column_max(const SparseConstraintSystem& sys, std::int32_t j) {
  const auto& col = sys.columns[static_cast<std::size_t>(j)];
  return col.empty() ? 0.0 : col.front().coef;
}

}  // namespace poslp
