#include "roamp/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "roamp/errors.hpp"

namespace roamp {

namespace {

constexpr char kMagic[8] = {'R', 'O', 'A', 'M', 'P', 'I', 'N', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

Eigen::VectorXd sample_prior(PriorKind kind, int n, Rng& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = kind == PriorKind::Rademacher ? rng.sign() : rng.normal();
  return x;
}

Eigen::VectorXd side_information(const Eigen::VectorXd& x, double w0, Rng& rng) {
  Eigen::VectorXd c(x.size());
  const double a = std::sqrt(w0);
  const double b = std::sqrt(1.0 - w0);
  for (Eigen::Index i = 0; i < x.size(); ++i) c[i] = a * x[i] + b * rng.normal();
  return c;
}

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("read_instance: truncated file");
  return v;
}

void put_block(std::ostream& os, const double* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void get_block(std::istream& is, double* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw ConfigError("read_instance: truncated file");
}

}  // namespace

std::string describe(const NoiseModel& noise) {
  if (std::holds_alternative<GaussianNoise>(noise)) return "gaussian";
  const auto& ri = std::get<RotationInvariantNoise>(noise);
  return "ri:" + ri.spectrum.describe() + (ri.mode == SingularValueMode::Quantile ? ":quantile" : ":iid");
}

double moment(std::span<const WeightedPoint> measure, int k) {
  double s = 0.0;
  for (const auto& p : measure) s += p.weight * std::pow(p.location, k);
  return s;
}

Eigen::MatrixXd sample_haar_columns(int n, int k, Rng& rng) {
  if (n < 1 || k < 1 || k > n) throw DomainError("sample_haar_columns: need 1 <= k <= n");
  const Eigen::MatrixXd g = gaussian_matrix(n, k, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const auto& r = qr.matrixQR();
  for (int j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Eigen::MatrixXd sample_haar_orthogonal(int n, Rng& rng) { return sample_haar_columns(n, n, rng); }

Eigen::MatrixXd sample_ri_noise(const SpectrumModel& spectrum, int M, int N, Rng& rng,
                                SingularValueMode mode) {
  if (M > N) throw DomainError("sample_ri_noise: M > N is not supported");
  if (M < 1) throw DomainError("sample_ri_noise: M must be positive");
  Eigen::VectorXd sigma(M);
  for (int i = 0; i < M; ++i) {
    const double p = mode == SingularValueMode::Iid ? rng.uniform() : (i + 0.5) / M;
    sigma[i] = std::sqrt(std::max(0.0, spectrum.quantile(p)));
  }
  const Eigen::MatrixXd U = sample_haar_orthogonal(M, rng);
  const Eigen::MatrixXd V = sample_haar_columns(N, M, rng);
  return U * sigma.asDiagonal() * V.transpose();
}

Eigen::MatrixXd sample_gaussian_noise(int M, int N, Rng& rng) {
  if (M > N) throw DomainError("sample_gaussian_noise: M > N is not supported");
  return gaussian_matrix(M, N, rng) / std::sqrt(static_cast<double>(N));
}

ProblemInstance make_instance(const PriorModel& prior_u, const PriorModel& prior_v,
                              const NoiseModel& noise, int M, int N, double theta,
                              std::uint64_t seed, bool keep_noise) {
  if (M < 1 || N < 1) throw DomainError("make_instance: dimensions must be positive");
  if (M > N) throw DomainError("make_instance: M > N is not supported");
  if (!(theta >= 0.0)) throw DomainError("make_instance: theta must be >= 0");

  ProblemInstance inst;
  inst.M = M;
  inst.N = N;
  inst.theta = theta;
  inst.seed = seed;
  inst.prior_u = prior_u;
  inst.prior_v = prior_v;
  inst.noise_descriptor = describe(noise);

  Rng ru(seed, Stream::SignalU);
  Rng rv(seed, Stream::SignalV);
  inst.u_star = sample_prior(prior_u.kind, M, ru);
  inst.v_star = sample_prior(prior_v.kind, N, rv);
  Rng ra(seed, Stream::SideInfoU);
  Rng rb(seed, Stream::SideInfoV);
  inst.a = side_information(inst.u_star, prior_u.side_info_strength, ra);
  inst.b = side_information(inst.v_star, prior_v.side_info_strength, rb);

  Rng rn(seed, Stream::Noise);
  Eigen::MatrixXd W = std::holds_alternative<GaussianNoise>(noise)
                          ? sample_gaussian_noise(M, N, rn)
                          : sample_ri_noise(std::get<RotationInvariantNoise>(noise).spectrum, M, N,
                                            rn, std::get<RotationInvariantNoise>(noise).mode);
  inst.Y = W;
  if (theta != 0.0) {
    const double scale = theta / std::sqrt(static_cast<double>(M) * N);
    inst.Y.noalias() += scale * inst.u_star * inst.v_star.transpose();
  }
  if (keep_noise) inst.W = std::move(W);
  return inst;
}

SvdCache thin_svd(const Eigen::MatrixXd& Y) {
  const Eigen::Index M = Y.rows();
  const Eigen::Index N = Y.cols();
  if (M > N) throw DomainError("thin_svd: expects M <= N");
  SvdCache svd;

  // Eigendecomposition of the Gram matrix is several times faster than a
  // bidiagonal SVD at these sizes; fall back when Y is badly conditioned.
  Eigen::MatrixXd gram(M, M);
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Y);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.selfadjointView<Eigen::Lower>());
  if (eig.info() != Eigen::Success) throw ConvergenceError("thin_svd: eigensolver failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev[M - 1];
  if (top > 0.0 && ev[0] > 1e-6 * top) {
    svd.sigma.resize(M);
    svd.U.resize(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
      svd.sigma[i] = std::sqrt(ev[M - 1 - i]);
      svd.U.col(i) = eig.eigenvectors().col(M - 1 - i);
    }
    svd.V.noalias() = Y.transpose() * svd.U;
    svd.V *= svd.sigma.cwiseInverse().asDiagonal();
    return svd;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> bdc(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (bdc.info() != Eigen::Success) throw ConvergenceError("thin_svd: SVD failed");
  svd.sigma = bdc.singularValues();
  svd.U = bdc.matrixU();
  svd.V = bdc.matrixV();
  return svd;
}

EmpiricalSignalMeasures empirical_signal_measures(const ProblemInstance& inst, const SvdCache& svd) {
  const int M = inst.M;
  const int N = inst.N;
  const Eigen::VectorXd pu = svd.U.transpose() * inst.u_star;
  const Eigen::VectorXd pv = svd.V.transpose() * inst.v_star;
  EmpiricalSignalMeasures out;
  out.L = M + N;
  out.nu_M1.reserve(M);
  out.nu_N2.reserve(M + 1);
  out.nu_L3.reserve(2 * M);
  for (int i = 0; i < M; ++i) {
    const double lambda = svd.sigma[i] * svd.sigma[i];
    out.nu_M1.push_back({lambda, pu[i] * pu[i] / M});
    out.nu_N2.push_back({lambda, pv[i] * pv[i] / N});
    const double w = 0.5 * pu[i] * pv[i] / out.L;
    out.nu_L3.push_back({svd.sigma[i], w});
    out.nu_L3.push_back({-svd.sigma[i], -w});
  }
  if (N > M) {
    const double null_weight = (inst.v_star.squaredNorm() - pv.squaredNorm()) / N;
    out.nu_N2.push_back({0.0, std::max(0.0, null_weight)});
  }
  return out;
}

void write_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("write_instance: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kFormatVersion);
  put<std::int64_t>(os, inst.M);
  put<std::int64_t>(os, inst.N);
  put<double>(os, inst.theta);
  put<std::uint64_t>(os, inst.seed);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(inst.prior_u.kind));
  put<double>(os, inst.prior_u.side_info_strength);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(inst.prior_v.kind));
  put<double>(os, inst.prior_v.side_info_strength);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(inst.noise_descriptor.size()));
  os.write(inst.noise_descriptor.data(), static_cast<std::streamsize>(inst.noise_descriptor.size()));
  put_block(os, inst.u_star.data(), inst.M);
  put_block(os, inst.v_star.data(), inst.N);
  put_block(os, inst.a.data(), inst.M);
  put_block(os, inst.b.data(), inst.N);
  put_block(os, inst.Y.data(), static_cast<std::size_t>(inst.M) * inst.N);
  if (!os) throw ConfigError("write_instance: write failed for " + path);
}

ProblemInstance read_instance(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("read_instance: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ConfigError("read_instance: " + path + " is not an instance dump");
  const auto version = get<std::uint32_t>(is);
  if (version != kFormatVersion)
    throw ConfigError("read_instance: unsupported format version " + std::to_string(version));
  ProblemInstance inst;
  inst.M = static_cast<int>(get<std::int64_t>(is));
  inst.N = static_cast<int>(get<std::int64_t>(is));
  if (inst.M < 1 || inst.N < inst.M) throw ConfigError("read_instance: bad dimensions");
  inst.theta = get<double>(is);
  inst.seed = get<std::uint64_t>(is);
  inst.prior_u.kind = static_cast<PriorKind>(get<std::uint8_t>(is));
  inst.prior_u.side_info_strength = get<double>(is);
  inst.prior_v.kind = static_cast<PriorKind>(get<std::uint8_t>(is));
  inst.prior_v.side_info_strength = get<double>(is);
  inst.noise_descriptor.resize(get<std::uint32_t>(is));
  is.read(inst.noise_descriptor.data(), static_cast<std::streamsize>(inst.noise_descriptor.size()));
  inst.u_star.resize(inst.M);
  inst.v_star.resize(inst.N);
  inst.a.resize(inst.M);
  inst.b.resize(inst.N);
  inst.Y.resize(inst.M, inst.N);
  get_block(is, inst.u_star.data(), inst.M);
  get_block(is, inst.v_star.data(), inst.N);
  get_block(is, inst.a.data(), inst.M);
  get_block(is, inst.b.data(), inst.N);
  get_block(is, inst.Y.data(), static_cast<std::size_t>(inst.M) * inst.N);
  return inst;
}

}  // namespace roamp
