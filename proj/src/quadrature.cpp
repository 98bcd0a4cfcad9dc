#include "roamp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace roamp {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
QuadratureRule compute_gauss_hermite(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()[k];
    const double v = solver.eigenvectors()(0, k);
    rule.weights[k] = v * v;
    total += rule.weights[k];
  }
  for (double& w : rule.weights) w /= total;
  // Symmetrize: the rule is exactly symmetric in exact arithmetic.
  for (int k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (rule.nodes[n - 1 - k] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[n - 1 - k] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    rule.weights[k] = w;
    rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

template <typename Fn>
const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, std::mutex& mu, int n,
                             Fn&& compute) {
  if (n < 1) throw std::invalid_argument("quadrature rule needs n >= 1");
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute(n)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, compute_gauss_legendre);
}

const QuadratureRule& gauss_hermite_normal(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, compute_gauss_hermite);
}

QuadratureRule cosine_mapped_rule(double lo, double hi, int n, double t0, double t1) {
  const QuadratureRule& gl = gauss_legendre(n);
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  const double half = 0.5 * (t1 - t0);
  const double mid = 0.5 * (t1 + t0);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = mid + half * gl.nodes[k];
    rule.nodes[k] = c - r * std::cos(t);
    rule.weights[k] = gl.weights[k] * half * r * std::sin(t);
  }
  return rule;
}

QuadratureRule cosine_mapped_rule(double lo, double hi, int n) {
  return cosine_mapped_rule(lo, hi, n, 0.0, std::numbers::pi);
}

}  // namespace roamp
