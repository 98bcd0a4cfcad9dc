#pragma once

#include <functional>
#include <string>

namespace roamp {

enum class PriorKind { Rademacher, UnitGaussian };

PriorKind parse_prior_kind(const std::string& name);
std::string to_string(PriorKind kind);

/// Unit-variance signal prior together with the strength w0 of the Gaussian
/// side-information channel C = sqrt(w0) X* + sqrt(1 - w0) Z_c.
struct PriorModel {
  PriorKind kind = PriorKind::Rademacher;
  double side_info_strength = 0.0;
};

struct ChannelOptions {
  int hermite_nodes = 101;
  // Nodes for X* when the prior itself is Gaussian.
  int prior_nodes = 41;
};

struct ChannelStats {
  double alpha = 0.0;          // E[X* f(X, C)]
  double second_moment = 0.0;  // E[f(X, C)^2]
  double variance() const { return second_moment - alpha * alpha; }
};

/// Strength of the single channel equivalent to observing both
/// sqrt(w) X* + sqrt(1-w) Z and the side information at strength w0.
double combined_strength(double w, double w0);

/// mmse of X* given the channel at strength w alone (no side information);
/// the quadrature starts at `hermite_nodes` and is refined by node doubling.
double mmse_single(PriorKind kind, double w, int hermite_nodes = 101);

/// X = sqrt(w) X* + sqrt(1 - w) Z observed jointly with side information C.
/// Coefficients of the divergence-free correction are computed at
/// construction; evaluation is pure and thread-safe.
class ScalarChannel {
 public:
  ScalarChannel(PriorModel prior, double w, ChannelOptions opts = {});

  const PriorModel& prior() const { return prior_; }
  double w() const { return w_; }
  double w0() const { return prior_.side_info_strength; }
  double combined_strength() const { return roamp::combined_strength(w_, w0()); }

  /// E[X* | X = x, C = c]. At w = 1 the convention is sign(x) for the
  /// Rademacher prior and x for the Gaussian prior.
  double posterior_mean(double x, double c = 0.0) const;
  double posterior_mean_derivative(double x, double c = 0.0) const;

  /// E[Z phi(X; C)], with the quadrature refined by node doubling.
  double stein_coefficient() const { return stein_; }

  /// Divergence-free posterior mean. At w = 0 this is E[X* | C], the
  /// continuous extension (0 without side information).
  double dmmse(double x, double c = 0.0) const;
  double dmmse_derivative(double x, double c = 0.0) const;

  /// E[(X* - E[X*|X, C])^2], clamped to [0, 1].
  double mmse() const;

  /// E[g(X*, X, C)] by Gauss-Hermite over (X*, Z, Z_c).
  double expect(const std::function<double(double, double, double)>& g) const;
  ChannelStats stats(const std::function<double(double, double)>& f) const;

 private:
  double expect_with(int nodes, const std::function<double(double, double, double)>& g) const;

  PriorModel prior_;
  double w_;
  ChannelOptions opts_;
  double stein_ = 0.0;
  double dmmse_slope_ = 0.0;
  double dmmse_den_ = 1.0;
};

}  // namespace roamp
