#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roamp/model.hpp"

namespace roamp {

struct BaselineResult {
  std::string method;
  // One entry per iteration; a single entry for one-shot methods.
  std::vector<double> cos2_u;
  std::vector<double> cos2_v;
  std::vector<double> mse_u;
  std::vector<double> mse_v;
  int iterations = 0;
  Eigen::VectorXd u_hat;
  Eigen::VectorXd v_hat;
};

/// Top singular pair of Y, signs aligned with the ground truth for reporting.
BaselineResult pca_estimate(const SvdCache& svd, const ProblemInstance& inst);

/// Rank-one rectangular AMP for Gaussian noise with empirical Onsager terms:
///   v_t = Y^T f_{t-1} - delta <f'_{t-1}> g_{t-1},
///   u_t = Y g_t - <g'_t> f_{t-1},
/// f, g posterior means given the SE channel laws, f_0 = E[U* | a].
BaselineResult gaussian_amp_run(const ProblemInstance& inst, int T);

struct AmpSeState {
  int t = 0;
  // Iterate strengths of the v- and u-channels after normalization.
  double w_v = 0.0;
  double w_u = 0.0;
  double cos2_v = 0.0;
  double cos2_u = 0.0;
};

/// Scalar recursion tracked by gaussian_amp_run.
std::vector<AmpSeState> gaussian_amp_se(double theta, double delta, const PriorModel& prior_u,
                                        const PriorModel& prior_v, int T);

}  // namespace roamp
