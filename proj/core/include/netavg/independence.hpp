#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netavg/dataset.hpp"

namespace netavg {

struct CiTestResult {
  double statistic = 0.0;             // G^2 = 2 n MI
  std::int64_t degrees_of_freedom = 1;
  double p_value = 1.0;
  double mi_estimate = 0.0;           // nats
  // x or y had a single observed level in this dataset, so the test carries
  // no information (statistic 0, p-value 1).
  bool degenerate = false;
};

// Conditional mutual information of the (x, y) cells across strata, weighted
// by stratum frequency. With forced_lambda absent, each stratum's cell
// frequencies are James-Stein-shrunk toward the uniform table by the
// closed-form risk-minimizing intensity; forced_lambda pins the intensity
// instead (0 = maximum-likelihood estimate, 1 = uniform target).
double conditional_mutual_information(const ContingencyTable& table,
                                      std::optional<double> forced_lambda);

// Shrinkage intensity lambda* for one stratum, clamped to [0, 1]. Strata with
// fewer than two observations shrink fully.
double shrinkage_lambda(const ContingencyTable& table, int stratum);

// chi-square(df) upper tail of the statistic.
double chi_squared_upper_tail(double statistic, std::int64_t df);

// Likelihood-ratio mutual information test: statistic 2 n MI against
// chi-square with (r_x - 1)(r_y - 1) prod r_z degrees of freedom (never
// below 1).
CiTestResult mi_g2_test(const Dataset& data, int x, int y, const std::vector<int>& z);

// Same reference distribution, MI from shrunk cell probabilities.
CiTestResult mi_shrinkage_test(const Dataset& data, int x, int y, const std::vector<int>& z);

}  // namespace netavg
