#include "netavg/independence.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "netavg/error.hpp"

namespace netavg {

namespace {

// MI contribution of one stratum given its cell counts and the shrinkage
// intensity to apply there. Probabilities are conditional on the stratum.
double stratum_mi(const ContingencyTable& table, int stratum, double lambda) {
  const int rx = table.card_x();
  const int ry = table.card_y();
  const double ns = static_cast<double>(table.stratum_total(stratum));
  if (ns == 0.0) return 0.0;

  const double uniform = 1.0 / (static_cast<double>(rx) * static_cast<double>(ry));
  std::vector<double> cell(static_cast<std::size_t>(rx) * ry);
  std::vector<double> px(rx, 0.0);
  std::vector<double> py(ry, 0.0);
  for (int i = 0; i < rx; ++i) {
    for (int j = 0; j < ry; ++j) {
      const double ml = static_cast<double>(table.at(i, j, stratum)) / ns;
      const double p = lambda == 0.0 ? ml : lambda * uniform + (1.0 - lambda) * ml;
      cell[static_cast<std::size_t>(i) * ry + j] = p;
      px[i] += p;
      py[j] += p;
    }
  }

  double mi = 0.0;
  for (int i = 0; i < rx; ++i) {
    for (int j = 0; j < ry; ++j) {
      const double p = cell[static_cast<std::size_t>(i) * ry + j];
      if (p > 0.0) mi += p * std::log(p / (px[i] * py[j]));
    }
  }
  return mi;
}

CiTestResult run_test(const Dataset& data, int x, int y, const std::vector<int>& z,
                      std::optional<double> forced_lambda) {
  // A symmetric statistic must not depend on argument order, so canonicalize.
  if (x > y) std::swap(x, y);
  const ContingencyTable table = contingency_counts(data, x, y, z);

  CiTestResult result;
  std::int64_t df = static_cast<std::int64_t>(table.card_x() - 1) * (table.card_y() - 1);
  for (int zi : z) df *= data.variables()[static_cast<std::size_t>(zi)].cardinality();
  result.degrees_of_freedom = std::max<std::int64_t>(df, 1);

  // Levels never observed anywhere make x (or y) constant: nothing to test.
  std::vector<std::int64_t> seen_x(table.card_x(), 0);
  std::vector<std::int64_t> seen_y(table.card_y(), 0);
  for (int s = 0; s < table.n_strata(); ++s) {
    for (int i = 0; i < table.card_x(); ++i) {
      for (int j = 0; j < table.card_y(); ++j) {
        const std::int64_t c = table.at(i, j, s);
        seen_x[i] += c;
        seen_y[j] += c;
      }
    }
  }
  const auto positive = [](std::int64_t c) { return c > 0; };
  if (std::count_if(seen_x.begin(), seen_x.end(), positive) < 2 ||
      std::count_if(seen_y.begin(), seen_y.end(), positive) < 2) {
    result.degenerate = true;
    return result;
  }

  result.mi_estimate = conditional_mutual_information(table, forced_lambda);
  result.statistic = 2.0 * static_cast<double>(data.row_count()) * result.mi_estimate;
  result.p_value = chi_squared_upper_tail(result.statistic, result.degrees_of_freedom);
  return result;
}

}  // namespace

double shrinkage_lambda(const ContingencyTable& table, int stratum) {
  const std::int64_t ns = table.stratum_total(stratum);
  if (ns <= 1) return 1.0;

  const int rx = table.card_x();
  const int ry = table.card_y();
  const double uniform = 1.0 / (static_cast<double>(rx) * static_cast<double>(ry));
  const double n = static_cast<double>(ns);
  double numerator = 0.0;
  double denominator = 0.0;
  for (int i = 0; i < rx; ++i) {
    for (int j = 0; j < ry; ++j) {
      const double p = static_cast<double>(table.at(i, j, stratum)) / n;
      numerator += p * (1.0 - p) / (n - 1.0);
      denominator += (uniform - p) * (uniform - p);
    }
  }
  if (denominator == 0.0) return 1.0;  // already at the target
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

double conditional_mutual_information(const ContingencyTable& table,
                                      std::optional<double> forced_lambda) {
  const double total = static_cast<double>(table.total());
  if (total == 0.0) return 0.0;

  double mi = 0.0;
  for (int s = 0; s < table.n_strata(); ++s) {
    const std::int64_t ns = table.stratum_total(s);
    if (ns == 0) continue;
    const double lambda = forced_lambda ? *forced_lambda : shrinkage_lambda(table, s);
    mi += (static_cast<double>(ns) / total) * stratum_mi(table, s, lambda);
  }
  // The estimate is nonnegative by construction; rounding may leave a tiny
  // negative residue.
  return std::max(mi, 0.0);
}

double chi_squared_upper_tail(double statistic, std::int64_t df) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(df) / 2.0, statistic / 2.0);
}

CiTestResult mi_g2_test(const Dataset& data, int x, int y, const std::vector<int>& z) {
  return run_test(data, x, y, z, 0.0);
}

CiTestResult mi_shrinkage_test(const Dataset& data, int x, int y, const std::vector<int>& z) {
  return run_test(data, x, y, z, std::nullopt);
}

}  // namespace netavg
