#pragma once

#include <functional>
#include <span>
#include <vector>

namespace roamp {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};

/// Sample mean and standard error of the mean (n - 1 denominator).
MeanSe mean_se(std::span<const double> x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against the standard normal.
KsResult ks_test_normal(std::vector<double> x);

/// Asymptotic Kolmogorov tail probability P(K > lambda).
double kolmogorov_tail(double lambda);

/// W1 distance between the empirical law of x and a law given by its
/// quantile function, integrated over a uniform probability grid.
double wasserstein1(std::vector<double> x, const std::function<double(double)>& quantile,
                    int grid_per_sample = 8);

}  // namespace roamp
