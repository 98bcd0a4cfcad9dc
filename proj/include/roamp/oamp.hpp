#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "roamp/model.hpp"
#include "roamp/scalar_channel.hpp"
#include "roamp/spectra.hpp"
#include "roamp/state_evolution.hpp"

namespace roamp {

enum class Side { Left, Right };

/// Matrix functions of Y Y^T (left) or Y^T Y (right) applied through the
/// cached SVD. `values` holds h at the squared singular values.
class SpectralAction {
 public:
  explicit SpectralAction(const SvdCache& svd) : svd_(&svd) {}

  /// h(lambda_i) for every squared singular value; throws DomainError naming
  /// the eigenvalue when h is not finite there.
  Eigen::VectorXd evaluate(const std::function<double(double)>& h) const;

  /// U diag(h) U^T x.
  Eigen::VectorXd left(const Eigen::VectorXd& h, const Eigen::VectorXd& x) const;
  /// h0 y + V diag(h - h0) V^T y; h0 is the value on the null space.
  Eigen::VectorXd right(const Eigen::VectorXd& h, double h0, const Eigen::VectorXd& y) const;
  /// h(Y Y^T) Y g = U diag(h sigma) V^T g.
  Eigen::VectorXd left_cross(const Eigen::VectorXd& h, const Eigen::VectorXd& g) const;
  /// h(Y^T Y) Y^T f = V diag(h sigma) U^T f.
  Eigen::VectorXd right_cross(const Eigen::VectorXd& h, const Eigen::VectorXd& f) const;

  Eigen::VectorXd apply(const std::function<double(double)>& h, Side side, double h_at_zero,
                        const Eigen::VectorXd& x) const;

 private:
  const SvdCache* svd_;
};

/// The optimal matrix denoisers for given (rho1, rho2). Evaluators take the
/// shrinkage terms at a spectral location; the kernels are written in a
/// form that stays finite at outlier atoms. Holds a reference to `measures`,
/// which must outlive it.
class DenoiserSet {
 public:
  DenoiserSet(const InducedMeasures& measures, double rho1, double rho2);

  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }
  const InducedMeasures& measures() const { return *measures_; }

  double P(const ShrinkageTerms& t) const;
  double P_tilde(const ShrinkageTerms& t) const;
  double Q(const ShrinkageTerms& t) const;
  double Q_tilde(const ShrinkageTerms& t) const;
  /// D(lambda) phi-denominator: (rho1 phi1 + 1)(rho2 phi2 + delta) lambda - rho1 rho2 phi3^2.
  double D(const ShrinkageTerms& t) const;
  /// (1 - P) / rho1 and (1 - Q) / rho2, defined also at rho = 0.
  double R1(const ShrinkageTerms& t) const;
  double R2(const ShrinkageTerms& t) const;

  double F(const ShrinkageTerms& t) const;
  double F_tilde(const ShrinkageTerms& t) const;
  double G(const ShrinkageTerms& t) const;
  double G_tilde(const ShrinkageTerms& t) const;

  /// <P*>_mu and <Q*>_{mu tilde}.
  double p_norm() const { return p_norm_; }
  double q_norm() const { return q_norm_; }
  double r1_mean() const { return r1_mean_; }
  double r2_mean() const { return r2_mean_; }

  /// 1 - (1 - <P*>) / (<P*> rho1) and the v-side counterpart.
  double next_w1() const { return 1.0 - r1_mean_ / p_norm_; }
  double next_w2() const { return 1.0 - r2_mean_ / q_norm_; }

  MatrixDenoisers as_matrix_denoisers() const;

 private:
  double kernel(const ShrinkageTerms& t) const;

  const InducedMeasures* measures_;
  double rho1_;
  double rho2_;
  double p_norm_ = 0.0;
  double q_norm_ = 0.0;
  double r1_mean_ = 0.0;
  double r2_mean_ = 0.0;
};

DenoiserSet build_optimal_denoisers(const InducedMeasures& measures, double rho1, double rho2);

struct IterationRecord {
  int t = 0;
  double cos2_u = 0.0;
  double cos2_v = 0.0;
  double mse_u = 0.0;
  double mse_v = 0.0;
  double pred_w1 = 0.0;
  double pred_w2 = 0.0;
  double pred_mmse_u = 0.0;
  double pred_mmse_v = 0.0;
  double pred_cos2_u = 0.0;
  double pred_cos2_v = 0.0;
  double seconds = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  // Raw iterates u_t, v_t (before post-processing) when requested.
  std::vector<Eigen::VectorXd> u_iterates;
  std::vector<Eigen::VectorXd> v_iterates;
};

struct RunOptions {
  bool store_iterates = false;
};

double cos2(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Optimal OAMP. `se.states[t]` supplies (rho1, rho2, w1, w2) for iteration t;
/// at least T + 1 states are required.
IterationTrace optimal_oamp_run(const ProblemInstance& inst, const SvdCache& svd,
                                const InducedMeasures& measures, std::span<const SeState> se, int T,
                                const RunOptions& opts = {});

struct SpectralDenoiser {
  // Value at a squared singular value of Y.
  std::function<double(double)> h;
  // Value on the null space of Y^T Y (right side only).
  double at_zero = 0.0;
};

struct IterateDenoiser {
  IterateFn fn;
  // SE law of the iterate fed to fn; used for the divergence check.
  std::optional<ChannelLaw> law;
};

/// One iteration of the general template:
///   u_t = F_t(YY^T) f_t(u_{t-1}; a) + F~_t(YY^T) Y g_t(v_{t-1}; b),
///   v_t = G_t(Y^TY) g_t(v_{t-1}; b) + G~_t(Y^TY) Y^T f_t(u_{t-1}; a),
/// with estimates phi_u(u_t; a), phi_v(v_t; b). Iterate denoisers here act
/// on the most recent iterate only.
struct GeneralOampStep {
  SpectralDenoiser F;
  SpectralDenoiser F_tilde;
  SpectralDenoiser G;
  SpectralDenoiser G_tilde;
  IterateDenoiser f;
  IterateDenoiser g;
  IterateFn phi_u;
  IterateFn phi_v;
  // Reported alongside the empirical values; optional.
  double pred_cos2_u = 0.0;
  double pred_cos2_v = 0.0;
};

struct GeneralOampSpec {
  std::vector<GeneralOampStep> steps;
};

/// Trace-free check of F_t, G_t against mu, mu tilde (1e-8) and Stein check
/// of f_t, g_t under their declared laws (1e-3). Throws InconsistencyError.
void validate_spec(const GeneralOampSpec& spec, const SpectrumModel& spectrum,
                   const PriorModel& prior_u, const PriorModel& prior_v);

IterationTrace general_oamp_run(const ProblemInstance& inst, const SvdCache& svd,
                                const GeneralOampSpec& spec, int T, const RunOptions& opts = {});

/// The optimal algorithm expressed as a general spec (scaling folded into the
/// matrix denoisers).
GeneralOampSpec optimal_spec(const InducedMeasures& measures, const PriorModel& prior_u,
                             const PriorModel& prior_v, std::span<const SeState> se, int T);

}  // namespace roamp
