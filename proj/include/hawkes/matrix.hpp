#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hawkes/errors.hpp"

namespace hawkes {

// Square nonnegative matrix of excitation magnitudes between dimensions.
// Entries are always addressed as (from, to): the expected number of events
// a single event in dimension `from` triggers in dimension `to`.
//
// Storage follows the column convention used by the stationarity algebra,
// entry(target, source) laid out target-major, so that as a linear map it
// acts on rates indexed by target dimension. Call sites never see that
// layout; only the named accessors exist, precisely to make transposition
// bugs impossible to type.
class InfluenceMatrix {
 public:
  InfluenceMatrix() = default;

  explicit InfluenceMatrix(int dims, double fill = 0.0)
      : dims_(dims), cells_(static_cast<std::size_t>(dims) * dims, fill) {
    if (dims <= 0) throw contract_error("InfluenceMatrix needs dims >= 1");
    if (!(fill >= 0.0)) throw contract_error("influence entries must be >= 0");
  }

  // rows[to][from], convenient for literal scenario tables.
  static InfluenceMatrix from_to_rows(
      const std::vector<std::vector<double>>& rows_from_major) {
    const int m = static_cast<int>(rows_from_major.size());
    InfluenceMatrix out(m);
    for (int from = 0; from < m; ++from) {
      if (static_cast<int>(rows_from_major[from].size()) != m) {
        throw contract_error("influence matrix rows must be square");
      }
      for (int to = 0; to < m; ++to) {
        out.set(from, to, rows_from_major[from][to]);
      }
    }
    return out;
  }

  [[nodiscard]] int dims() const noexcept { return dims_; }
  [[nodiscard]] bool empty() const noexcept { return dims_ == 0; }

  [[nodiscard]] double get(int from, int to) const {
    check_index(from, to);
    return cells_[static_cast<std::size_t>(to) * dims_ + from];
  }

  void set(int from, int to, double value) {
    check_index(from, to);
    if (!(value >= 0.0)) {
      throw contract_error("influence entry (" + std::to_string(from + 1) +
                           " -> " + std::to_string(to + 1) +
                           ") must be >= 0 and finite");
    }
    cells_[static_cast<std::size_t>(to) * dims_ + from] = value;
  }

  // Sum over targets of entries leaving `from`.
  [[nodiscard]] double row_sum_from(int from) const {
    double s = 0.0;
    for (int to = 0; to < dims_; ++to) s += get(from, to);
    return s;
  }

  [[nodiscard]] double max_entry() const {
    double m = 0.0;
    for (double c : cells_) m = c > m ? c : m;
    return m;
  }

  [[nodiscard]] bool operator==(const InfluenceMatrix& other) const {
    return dims_ == other.dims_ && cells_ == other.cells_;
  }

 private:
  void check_index(int from, int to) const {
    if (from < 0 || from >= dims_ || to < 0 || to >= dims_) {
      throw contract_error("influence index out of range");
    }
  }

  int dims_{0};
  std::vector<double> cells_;
};

}  // namespace hawkes
