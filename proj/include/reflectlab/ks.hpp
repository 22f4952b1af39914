#pragma once

#include <cstddef>
#include <vector>

namespace reflectlab {

/// Survival function of the limiting Kolmogorov distribution,
/// P(sup |B_t| > lambda) for a Brownian bridge B.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;  ///< sup |F_x - F_y|
  double p_value = 1.0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
};

/// Two-sample Kolmogorov-Smirnov test. Ties are handled by evaluating the
/// empirical CDFs only between distinct values. The p-value uses the
/// asymptotic distribution with the Stephens small-sample correction.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

}  // namespace reflectlab
