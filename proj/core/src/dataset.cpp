#include "netavg/dataset.hpp"

#include <algorithm>

#include "netavg/rng.hpp"

namespace netavg {

Dataset::Dataset(std::vector<Variable> variables,
                 std::vector<std::vector<std::int32_t>> columns)
    : variables_(std::move(variables)), columns_(std::move(columns)) {
  if (variables_.empty()) throw DataError("dataset needs at least one variable");
  if (columns_.size() != variables_.size())
    throw DataError("column count does not match variable count");
  n_rows_ = static_cast<int>(columns_.front().size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (static_cast<int>(columns_[c].size()) != n_rows_)
      throw DataError("ragged columns in dataset");
    const int card = variables_[c].cardinality();
    for (std::int32_t v : columns_[c])
      if (v < 0 || v >= card)
        throw DataError("invalid level index " + std::to_string(v) + " in column " +
                        variables_[c].name);
  }
}

Dataset Dataset::from_rows(std::vector<Variable> variables,
                           const std::vector<std::vector<std::int32_t>>& rows) {
  std::vector<std::vector<std::int32_t>> columns(variables.size());
  for (auto& col : columns) col.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != variables.size()) throw DataError("ragged row in dataset");
    for (std::size_t c = 0; c < row.size(); ++c) columns[c].push_back(row[c]);
  }
  return Dataset(std::move(variables), std::move(columns));
}

NodeSet Dataset::node_set() const {
  std::vector<std::string> names;
  names.reserve(variables_.size());
  for (const auto& v : variables_) names.push_back(v.name);
  return NodeSet(std::move(names));
}

Dataset bootstrap_resample(const Dataset& data, std::uint64_t seed) {
  const int n = data.row_count();
  Rng rng(seed);
  std::vector<std::int32_t> picks(static_cast<std::size_t>(n));
  for (auto& p : picks) p = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n)));

  std::vector<std::vector<std::int32_t>> columns(static_cast<std::size_t>(data.column_count()));
  for (int c = 0; c < data.column_count(); ++c) {
    const auto src = data.column(c);
    auto& dst = columns[static_cast<std::size_t>(c)];
    dst.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      dst[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])];
  }
  return Dataset(data.variables(), std::move(columns));
}

Dataset permute_columns(const Dataset& data, std::uint64_t seed) {
  std::vector<std::vector<std::int32_t>> columns(static_cast<std::size_t>(data.column_count()));
  for (int c = 0; c < data.column_count(); ++c) {
    const auto src = data.column(c);
    auto& dst = columns[static_cast<std::size_t>(c)];
    dst.assign(src.begin(), src.end());
    Rng rng(derive_seed(derive_seed(seed, seed_stream::kColumn), static_cast<std::uint64_t>(c)));
    rng.shuffle(dst);
  }
  return Dataset(data.variables(), std::move(columns));
}

ContingencyTable::ContingencyTable(int card_x, int card_y, std::vector<int> z_cards)
    : card_x_(card_x), card_y_(card_y), z_cards_(std::move(z_cards)) {
  std::size_t strata = 1;
  for (int card : z_cards_) strata *= static_cast<std::size_t>(card);
  n_strata_ = static_cast<int>(strata);
  counts_.assign(static_cast<std::size_t>(card_x_) * static_cast<std::size_t>(card_y_) * strata, 0);
}

std::int64_t ContingencyTable::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts_) sum += c;
  return sum;
}

std::int64_t ContingencyTable::stratum_total(int stratum) const {
  std::int64_t sum = 0;
  for (int x = 0; x < card_x_; ++x)
    for (int y = 0; y < card_y_; ++y) sum += at(x, y, stratum);
  return sum;
}

ContingencyTable contingency_counts(const Dataset& data, int x, int y,
                                    const std::vector<int>& z) {
  if (x == y) throw std::invalid_argument("contingency_counts: x == y");
  for (int zc : z)
    if (zc == x || zc == y)
      throw std::invalid_argument("contingency_counts: z overlaps x or y");

  std::vector<int> z_cards;
  z_cards.reserve(z.size());
  for (int zc : z) z_cards.push_back(data.variable(zc).cardinality());

  ContingencyTable table(data.variable(x).cardinality(), data.variable(y).cardinality(),
                         std::move(z_cards));

  const auto col_x = data.column(x);
  const auto col_y = data.column(y);
  for (int row = 0; row < data.row_count(); ++row) {
    int stratum = 0;
    for (std::size_t zi = 0; zi < z.size(); ++zi) {
      stratum = stratum * table.z_cards()[zi] +
                data.value(row, z[zi]);
    }
    ++table.at(col_x[static_cast<std::size_t>(row)], col_y[static_cast<std::size_t>(row)], stratum);
  }
  return table;
}

}  // namespace netavg
