#include "doctest.h"
#include "reflectlab/ks.hpp"
#include "reflectlab/samplers.hpp"

#include <cmath>
#include <random>

using namespace reflectlab;

TEST_CASE("kolmogorov survival reference values") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(0.002));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(0.002));
  CHECK(kolmogorov_survival(1.9495) == doctest::Approx(0.001).epsilon(0.005));
  // Both series agree where they switch.
  CHECK(kolmogorov_survival(1.18 - 1e-12) == doctest::Approx(kolmogorov_survival(1.18)).epsilon(1e-9));
}

TEST_CASE("ks statistic with ties") {
  const KsResult same = ks_two_sample({1, 2, 2, 3}, {3, 2, 1, 2});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  const KsResult apart = ks_two_sample({0, 0, 0}, {1, 1});
  CHECK(apart.statistic == 1.0);
  const KsResult half = ks_two_sample({1, 2}, {2, 3});
  CHECK(half.statistic == 0.5);
  CHECK_THROWS(ks_two_sample({}, {1.0}));
}

TEST_CASE("ks type-I rate is calibrated") {
  // 500 repetitions of two independent samples from the same law; the
  // rejection rate at alpha must lie within 3 standard errors of alpha.
  const Sampler s = Sampler::parse("bm(dt=0.05,T=1)", 2024);
  const double alpha = 0.05;
  const int reps = 500;
  const int n = 200;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x, y;
    for (int i = 0; i < n; ++i) {
      x.push_back(s.sample(2 * n * r + i).value_at(1.0));
      y.push_back(s.sample(2 * n * r + n + i).value_at(1.0));
    }
    if (ks_two_sample(x, y).p_value < alpha) ++rejections;
  }
  const double rate = rejections / double(reps);
  const double se = std::sqrt(alpha * (1 - alpha) / reps);
  CHECK(std::abs(rate - alpha) <= 3 * se);
}
