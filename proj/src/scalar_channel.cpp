#include "roamp/scalar_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roamp/errors.hpp"
#include "roamp/quadrature.hpp"

namespace roamp {

PriorKind parse_prior_kind(const std::string& name) {
  if (name == "rademacher") return PriorKind::Rademacher;
  if (name == "gaussian" || name == "unit_gaussian") return PriorKind::UnitGaussian;
  throw ConfigError("unknown prior '" + name + "' (expected rademacher or gaussian)");
}

std::string to_string(PriorKind kind) {
  return kind == PriorKind::Rademacher ? "rademacher" : "gaussian";
}

namespace {

// Doubles the Gauss-Hermite node count until two successive estimates agree.
// Steep tanh posteriors at w near 1 need more than the default rule.
template <typename F>
double converged_by_doubling(F&& estimate, int nodes) {
  constexpr int kMaxNodes = 1616;
  double prev = estimate(nodes);
  while (nodes < kMaxNodes) {
    nodes *= 2;
    const double next = estimate(nodes);
    if (std::abs(next - prev) <= 1e-13) return next;
    prev = next;
  }
  return prev;
}

}  // namespace

double combined_strength(double w, double w0) {
  if (w >= 1.0 || w0 >= 1.0) return 1.0;
  const double s = w / (1.0 - w) + w0 / (1.0 - w0);
  return s / (1.0 + s);
}

double mmse_single(PriorKind kind, double w, int hermite_nodes) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("mmse: w must lie in [0, 1]");
  if (w >= 1.0) return 0.0;
  if (kind == PriorKind::UnitGaussian) return 1.0 - w;
  const double s = w / (1.0 - w);
  auto estimate = [s](int n) {
    const QuadratureRule& gh = gauss_hermite_normal(n);
    double e = 0.0;
    for (std::size_t k = 0; k < gh.size(); ++k) e += gh.weights[k] * std::tanh(s + std::sqrt(s) * gh.nodes[k]);
    return e;
  };
  const double e = converged_by_doubling(estimate, hermite_nodes);
  return std::clamp(1.0 - e, 0.0, 1.0);
}

ScalarChannel::ScalarChannel(PriorModel prior, double w, ChannelOptions opts)
    : prior_(prior), w_(w), opts_(opts) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("ScalarChannel: w must lie in [0, 1]");
  const double w0 = prior_.side_info_strength;
  if (!(w0 >= 0.0 && w0 < 1.0)) throw DomainError("ScalarChannel: side-information strength must lie in [0, 1)");
  if (w_ > 0.0 && w_ < 1.0) {
    const double sw = std::sqrt(1.0 - w_);
    // E[Z phi(X; C)], with Z recovered from (X*, X).
    auto estimate = [&](int n) {
      return expect_with(n, [&](double xs, double x, double c) {
        return (x - std::sqrt(w_) * xs) / sw * posterior_mean(x, c);
      });
    };
    stein_ = converged_by_doubling(estimate, opts_.hermite_nodes);
    dmmse_slope_ = stein_ / sw;
    dmmse_den_ = 1.0 - std::sqrt(w_) / sw * stein_;
  }
}

double ScalarChannel::posterior_mean(double x, double c) const {
  const double w0 = prior_.side_info_strength;
  if (w_ >= 1.0) {
    if (prior_.kind == PriorKind::UnitGaussian) return x;
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  }
  const double field = std::sqrt(w_) * x / (1.0 - w_) + std::sqrt(w0) * c / (1.0 - w0);
  if (prior_.kind == PriorKind::Rademacher) return std::tanh(field);
  return field / (1.0 + w_ / (1.0 - w_) + w0 / (1.0 - w0));
}

double ScalarChannel::posterior_mean_derivative(double x, double c) const {
  const double w0 = prior_.side_info_strength;
  if (w_ >= 1.0) return prior_.kind == PriorKind::UnitGaussian ? 1.0 : 0.0;
  const double gain = std::sqrt(w_) / (1.0 - w_);
  if (prior_.kind == PriorKind::Rademacher) {
    const double t = std::tanh(gain * x + std::sqrt(w0) * c / (1.0 - w0));
    return gain * (1.0 - t * t);
  }
  return gain / (1.0 + w_ / (1.0 - w_) + w0 / (1.0 - w0));
}

double ScalarChannel::dmmse(double x, double c) const {
  if (w_ >= 1.0) throw DegenerateChannelError("dmmse: undefined at w = 1");
  if (std::abs(dmmse_den_) < 1e-12)
    throw DegenerateChannelError("dmmse: vanishing denominator at w = " + std::to_string(w_));
  return (posterior_mean(x, c) - dmmse_slope_ * x) / dmmse_den_;
}

double ScalarChannel::dmmse_derivative(double x, double c) const {
  if (w_ >= 1.0) throw DegenerateChannelError("dmmse: undefined at w = 1");
  if (std::abs(dmmse_den_) < 1e-12)
    throw DegenerateChannelError("dmmse: vanishing denominator at w = " + std::to_string(w_));
  return (posterior_mean_derivative(x, c) - dmmse_slope_) / dmmse_den_;
}

double ScalarChannel::mmse() const {
  return mmse_single(prior_.kind, combined_strength(), opts_.hermite_nodes);
}

double ScalarChannel::expect(const std::function<double(double, double, double)>& g) const {
  return expect_with(opts_.hermite_nodes, g);
}

double ScalarChannel::expect_with(int nodes, const std::function<double(double, double, double)>& g) const {
  const QuadratureRule& gh = gauss_hermite_normal(nodes);
  const double w0 = prior_.side_info_strength;

  static const QuadratureRule kSigns{{-1.0, 1.0}, {0.5, 0.5}};
  static const QuadratureRule kOrigin{{0.0}, {1.0}};
  const QuadratureRule& xs_rule =
      prior_.kind == PriorKind::Rademacher ? kSigns : gauss_hermite_normal(opts_.prior_nodes);
  const QuadratureRule& zc_rule = w0 > 0.0 ? gh : kOrigin;

  const double a = std::sqrt(w_);
  const double b = std::sqrt(1.0 - w_);
  const double a0 = std::sqrt(w0);
  const double b0 = std::sqrt(1.0 - w0);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs_rule.size(); ++i) {
    const double xs = xs_rule.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const double x = a * xs + b * gh.nodes[j];
      double row = 0.0;
      for (std::size_t k = 0; k < zc_rule.size(); ++k) {
        row += zc_rule.weights[k] * g(xs, x, a0 * xs + b0 * zc_rule.nodes[k]);
      }
      inner += gh.weights[j] * row;
    }
    sum += xs_rule.weights[i] * inner;
  }
  return sum;
}

ChannelStats ScalarChannel::stats(const std::function<double(double, double)>& f) const {
  ChannelStats st;
  st.alpha = expect([&](double xs, double x, double c) { return xs * f(x, c); });
  st.second_moment = expect([&](double, double x, double c) {
    const double v = f(x, c);
    return v * v;
  });
  return st;
}

}  // namespace roamp
