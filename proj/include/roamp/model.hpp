#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "roamp/rng.hpp"
#include "roamp/scalar_channel.hpp"
#include "roamp/spectra.hpp"

namespace roamp {

enum class SingularValueMode { Iid, Quantile };

// W with i.i.d. N(0, 1/N) entries.
struct GaussianNoise {};

// W = U diag(sqrt(lambda)) V^T with Haar U, V and lambda_i drawn from mu.
struct RotationInvariantNoise {
  SpectrumModel spectrum;
  SingularValueMode mode = SingularValueMode::Iid;
};

using NoiseModel = std::variant<GaussianNoise, RotationInvariantNoise>;

std::string describe(const NoiseModel& noise);

/// Y = theta / sqrt(M N) u* v*^T + W with side information a, b.
struct ProblemInstance {
  int M = 0;
  int N = 0;
  double theta = 0.0;
  std::uint64_t seed = 0;
  std::string noise_descriptor;
  PriorModel prior_u;
  PriorModel prior_v;
  Eigen::MatrixXd Y;
  // Empty when the instance was generated with keep_noise = false or read
  // back from a dump.
  Eigen::MatrixXd W;
  Eigen::VectorXd u_star;
  Eigen::VectorXd v_star;
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  double delta() const { return static_cast<double>(M) / N; }
};

/// Thin SVD Y = U diag(sigma) V^T, sigma descending; U is M x M, V is N x M.
struct SvdCache {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;

  int M() const { return static_cast<int>(U.rows()); }
  int N() const { return static_cast<int>(V.rows()); }
  Eigen::VectorXd lambda() const { return sigma.array().square(); }
};

struct WeightedPoint {
  double location;
  double weight;
};

struct EmpiricalSignalMeasures {
  // Eigenvalues of Y Y^T weighted by <u_i, u*>^2 / M.
  std::vector<WeightedPoint> nu_M1;
  // Eigenvalues of Y^T Y weighted by <v_i, v*>^2 / N; the N - M dimensional
  // null space is one entry at 0.
  std::vector<WeightedPoint> nu_N2;
  // Eigenvalues +-sigma_i of the (M + N) dilation with signed weights.
  std::vector<WeightedPoint> nu_L3;
  int L = 0;
};

double moment(std::span<const WeightedPoint> measure, int k);

/// Haar orthogonal n x n matrix (QR of a Gaussian matrix, sign-corrected).
Eigen::MatrixXd sample_haar_orthogonal(int n, Rng& rng);
/// First k columns of a Haar orthogonal n x n matrix.
Eigen::MatrixXd sample_haar_columns(int n, int k, Rng& rng);

Eigen::MatrixXd sample_ri_noise(const SpectrumModel& spectrum, int M, int N, Rng& rng,
                                SingularValueMode mode = SingularValueMode::Iid);
Eigen::MatrixXd sample_gaussian_noise(int M, int N, Rng& rng);

/// Deterministic in (priors, noise, M, N, theta, seed).
ProblemInstance make_instance(const PriorModel& prior_u, const PriorModel& prior_v,
                              const NoiseModel& noise, int M, int N, double theta,
                              std::uint64_t seed, bool keep_noise = true);

SvdCache thin_svd(const Eigen::MatrixXd& Y);

EmpiricalSignalMeasures empirical_signal_measures(const ProblemInstance& inst, const SvdCache& svd);

/// Binary instance dump; layout described in docs/instance_format.md.
void write_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance read_instance(const std::string& path);

}  // namespace roamp
