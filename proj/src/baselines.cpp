#include "roamp/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "roamp/errors.hpp"
#include "roamp/oamp.hpp"
#include "roamp/state_evolution.hpp"

namespace roamp {

namespace {

constexpr double kMaxStrength = 1.0 - 1e-12;

// Normalized channel for an iterate with mean mu and noise variance var.
struct Normalized {
  double scale;
  double w;
};

Normalized normalize(double mu, double var) {
  const double s2 = mu * mu + var;
  if (!(s2 > 0.0)) return {0.0, 0.0};
  return {std::sqrt(s2), std::clamp(mu * mu / s2, 0.0, kMaxStrength)};
}

void denoise(const ScalarChannel& ch, double scale, const Eigen::VectorXd& x, const Eigen::VectorXd& c,
             Eigen::VectorXd& out, Eigen::VectorXd& deriv) {
  out.resize(x.size());
  deriv.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = scale > 0.0 ? x[i] / scale : 0.0;
    out[i] = ch.posterior_mean(xi, c[i]);
    deriv[i] = scale > 0.0 ? ch.posterior_mean_derivative(xi, c[i]) / scale : 0.0;
  }
}

}  // namespace

BaselineResult pca_estimate(const SvdCache& svd, const ProblemInstance& inst) {
  BaselineResult r;
  r.method = "pca";
  r.iterations = 1;
  r.u_hat = svd.U.col(0);
  r.v_hat = svd.V.col(0);
  if (r.u_hat.dot(inst.u_star) < 0.0) r.u_hat = -r.u_hat;
  if (r.v_hat.dot(inst.v_star) < 0.0) r.v_hat = -r.v_hat;
  r.cos2_u.push_back(cos2(r.u_hat, inst.u_star));
  r.cos2_v.push_back(cos2(r.v_hat, inst.v_star));
  // Unit singular vectors rescaled to the signal norm.
  const Eigen::VectorXd us = r.u_hat * std::sqrt(static_cast<double>(inst.M));
  const Eigen::VectorXd vs = r.v_hat * std::sqrt(static_cast<double>(inst.N));
  r.mse_u.push_back((us - inst.u_star).squaredNorm() / inst.M);
  r.mse_v.push_back((vs - inst.v_star).squaredNorm() / inst.N);
  return r;
}

BaselineResult gaussian_amp_run(const ProblemInstance& inst, int T) {
  if (T < 1) throw DomainError("gaussian_amp_run: T must be >= 1");
  const int M = inst.M;
  const int N = inst.N;
  const double delta = inst.delta();
  const double theta = inst.theta;

  BaselineResult r;
  r.method = "amp";
  Eigen::VectorXd f, fd, g = Eigen::VectorXd::Zero(N), gd;
  denoise(ScalarChannel(inst.prior_u, 0.0), 0.0, Eigen::VectorXd::Zero(M), inst.a, f, fd);
  double alpha = 1.0 - mmse_with_side_info(inst.prior_u, 0.0);

  for (int t = 1; t <= T; ++t) {
    Eigen::VectorXd v = inst.Y.transpose() * f;
    v -= delta * fd.mean() * g;
    const Normalized nv = normalize(theta * std::sqrt(delta) * alpha, delta * alpha);
    const ScalarChannel cv(inst.prior_v, nv.w);
    denoise(cv, nv.scale, v, inst.b, g, gd);
    const double beta = 1.0 - mmse_with_side_info(inst.prior_v, nv.w);

    Eigen::VectorXd u = inst.Y * g;
    u -= gd.mean() * f;
    const Normalized nu = normalize(theta / std::sqrt(delta) * beta, beta);
    const ScalarChannel cu(inst.prior_u, nu.w);
    denoise(cu, nu.scale, u, inst.a, f, fd);
    alpha = 1.0 - mmse_with_side_info(inst.prior_u, nu.w);

    if (!f.allFinite() || !g.allFinite()) throw DivergenceError("gaussian_amp_run: non-finite iterate", t);
    r.cos2_u.push_back(cos2(f, inst.u_star));
    r.cos2_v.push_back(cos2(g, inst.v_star));
    r.mse_u.push_back((f - inst.u_star).squaredNorm() / M);
    r.mse_v.push_back((g - inst.v_star).squaredNorm() / N);
  }
  r.iterations = T;
  r.u_hat = f;
  r.v_hat = g;
  return r;
}

std::vector<AmpSeState> gaussian_amp_se(double theta, double delta, const PriorModel& prior_u,
                                        const PriorModel& prior_v, int T) {
  std::vector<AmpSeState> out;
  double alpha = 1.0 - mmse_with_side_info(prior_u, 0.0);
  for (int t = 1; t <= T; ++t) {
    AmpSeState s;
    s.t = t;
    s.w_v = normalize(theta * std::sqrt(delta) * alpha, delta * alpha).w;
    const double beta = 1.0 - mmse_with_side_info(prior_v, s.w_v);
    s.w_u = normalize(theta / std::sqrt(delta) * beta, beta).w;
    alpha = 1.0 - mmse_with_side_info(prior_u, s.w_u);
    s.cos2_v = beta;
    s.cos2_u = alpha;
    out.push_back(s);
  }
  return out;
}

}  // namespace roamp
