#include "roamp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "roamp/errors.hpp"

namespace roamp {

MeanSe mean_se(std::span<const double> x) {
  MeanSe r;
  r.n = static_cast<int>(x.size());
  if (x.empty()) return r;
  double s = 0.0;
  for (double v : x) s += v;
  r.mean = s / r.n;
  if (r.n > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (r.n - 1) / r.n);
  }
  return r;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> x) {
  if (x.empty()) throw DomainError("ks_test_normal: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  KsResult r;
  r.statistic = d;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

double wasserstein1(std::vector<double> x, const std::function<double(double)>& quantile,
                    int grid_per_sample) {
  if (x.empty()) throw DomainError("wasserstein1: empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const std::size_t g = n * static_cast<std::size_t>(std::max(1, grid_per_sample));
  double sum = 0.0;
  for (std::size_t k = 0; k < g; ++k) {
    const double p = (k + 0.5) / g;
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(p * n));
    sum += std::abs(x[i] - quantile(p));
  }
  return sum / g;
}

}  // namespace roamp
