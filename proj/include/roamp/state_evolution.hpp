#pragma once

#include <functional>
#include <vector>

#include "roamp/scalar_channel.hpp"
#include "roamp/spectra.hpp"

namespace roamp {

/// Law of an iterate: U_t = mean * U* + sd * Z, jointly with the side
/// information of its prior.
struct ChannelLaw {
  double mean = 0.0;
  double sd = 0.0;

  double second_moment() const { return mean * mean + sd * sd; }
};

/// E[g(X*, U, C)] for U distributed according to `law`.
double expect_under(const PriorModel& prior, const ChannelLaw& law,
                    const std::function<double(double, double, double)>& g,
                    const ChannelOptions& opts = {});

/// Matrix denoisers evaluated through the shrinkage terms at a spectral
/// location, so that atoms are handled by the same evaluators.
struct MatrixDenoisers {
  TermFn F;
  TermFn F_tilde;
  TermFn G;
  TermFn G_tilde;
};

/// Separable iterate denoiser x, c -> f(x, c) acting on the previous iterate
/// and the side information.
using IterateFn = std::function<double(double, double)>;

struct SeState {
  int t = 0;
  double mu_u = 0.0;
  double sigma_u = 0.0;
  double mu_v = 0.0;
  double sigma_v = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double sigma_f2 = 0.0;
  double sigma_g2 = 0.0;
  // Optimal recursion only.
  double rho1 = 0.0;
  double rho2 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double mmse_u = 1.0;
  double mmse_v = 1.0;
  double p_norm = 0.0;
  double q_norm = 0.0;
};

/// One step of the general recursion: the iterate denoisers f, g are applied
/// to iterates with laws `law_u`, `law_v`, then the matrix denoisers act.
SeState se_step_general(const InducedMeasures& measures, const PriorModel& prior_u,
                        const PriorModel& prior_v, const ChannelLaw& law_u, const ChannelLaw& law_v,
                        const IterateFn& f, const IterateFn& g, const MatrixDenoisers& m,
                        const ChannelOptions& opts = {});

struct OptimalSeOptions {
  bool stop_at_plateau = false;
  double plateau_tolerance = 1e-12;
  // Replaces an infinite rho when the mmse reaches 0.
  double rho_cap = 1e15;
};

struct OptimalSeResult {
  // states[0] is the initial state (w1 = w2 = 0, side information only);
  // states[t] for t >= 1 are the iterations.
  std::vector<SeState> states;
  // First t with max(|dw1|, |dw2|) <= plateau_tolerance, or -1.
  int plateau_iteration = -1;
  bool monotone = true;

  const SeState& last() const { return states.back(); }
};

/// mmse of X* given an iterate at strength w and the side information.
double mmse_with_side_info(const PriorModel& prior, double w);

/// The squared cosine similarity predicted for the posterior-mean estimate.
double predicted_cos2(const PriorModel& prior, double w);

OptimalSeResult optimal_se_run(const InducedMeasures& measures, const PriorModel& prior_u,
                               const PriorModel& prior_v, int T, const OptimalSeOptions& opts = {});

struct FixedPointOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

struct FixedPointResult {
  double w1 = 0.0;
  double w2 = 0.0;
  double mmse_u = 1.0;
  double mmse_v = 1.0;
  int iterations = 0;
  // Set when the iteration started near w = 1 settles elsewhere.
  bool multiple = false;
  double alt_w1 = 0.0;
  double alt_w2 = 0.0;
};

/// Fixed point of the Gaussian-noise system
///   mmse_U(w1) = 1 - w2 / (theta^2 (1 - w2)),
///   mmse_V(w2) = 1 - delta w1 / (theta^2 (1 - w1)),
/// reached from w1 = w2 = 0 (side information only).
FixedPointResult gaussian_fixed_point(double theta, double delta, const PriorModel& prior_u,
                                      const PriorModel& prior_v, const FixedPointOptions& opts = {});

}  // namespace roamp
