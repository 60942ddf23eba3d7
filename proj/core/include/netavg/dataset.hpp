#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netavg/graph.hpp"
#include "netavg/variable.hpp"

namespace netavg {

// Immutable n x N table of categorical observations, stored column-major as
// level indices. Resampling operations are pure functions of (data, seed).
//
// Ingestion rejects empty tables; the zero-row state is reachable only
// programmatically, as the score functions accept it as a degenerate oracle
// input.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Variable> variables, std::vector<std::vector<std::int32_t>> columns);

  // Row-major convenience constructor, mostly for tests.
  static Dataset from_rows(std::vector<Variable> variables,
                           const std::vector<std::vector<std::int32_t>>& rows);

  int row_count() const { return n_rows_; }
  int column_count() const { return static_cast<int>(variables_.size()); }

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int col) const { return variables_[static_cast<std::size_t>(col)]; }
  NodeSet node_set() const;

  std::span<const std::int32_t> column(int col) const {
    return columns_[static_cast<std::size_t>(col)];
  }
  std::int32_t value(int row, int col) const {
    return columns_[static_cast<std::size_t>(col)][static_cast<std::size_t>(row)];
  }

 private:
  std::vector<Variable> variables_;
  std::vector<std::vector<std::int32_t>> columns_;
  int n_rows_ = 0;
};

// Rows drawn uniformly with replacement, at the original size n.
Dataset bootstrap_resample(const Dataset& data, std::uint64_t seed);

// Each column shuffled independently; per-column streams derive from
// (seed, column index) so the result does not depend on evaluation order.
Dataset permute_columns(const Dataset& data, std::uint64_t seed);

// Count tensor over (levels of x) x (levels of y) x (joint levels of z).
// Strata index the z configurations row-major, first z column slowest.
class ContingencyTable {
 public:
  ContingencyTable(int card_x, int card_y, std::vector<int> z_cards);

  int card_x() const { return card_x_; }
  int card_y() const { return card_y_; }
  int n_strata() const { return n_strata_; }
  const std::vector<int>& z_cards() const { return z_cards_; }

  std::int64_t& at(int x, int y, int stratum) {
    return counts_[index(x, y, stratum)];
  }
  std::int64_t at(int x, int y, int stratum) const {
    return counts_[index(x, y, stratum)];
  }

  std::int64_t total() const;
  std::int64_t stratum_total(int stratum) const;

 private:
  std::size_t index(int x, int y, int stratum) const {
    return (static_cast<std::size_t>(stratum) * static_cast<std::size_t>(card_x_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(card_y_) +
           static_cast<std::size_t>(y);
  }

  int card_x_;
  int card_y_;
  int n_strata_;
  std::vector<int> z_cards_;
  std::vector<std::int64_t> counts_;
};

ContingencyTable contingency_counts(const Dataset& data, int x, int y,
                                    const std::vector<int>& z);

}  // namespace netavg
