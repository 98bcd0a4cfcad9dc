#pragma once

#include <span>
#include <vector>

namespace roamp {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1] with n nodes (Newton iteration on the
/// three-term recurrence). Results are cached per n.
const QuadratureRule& gauss_legendre(int n);

/// Gauss-Hermite rule for the standard normal weight: sum_k w_k f(x_k)
/// approximates E[f(Z)], Z ~ N(0,1). Weights sum to one.
const QuadratureRule& gauss_hermite_normal(int n);

/// Gauss-Legendre nodes pushed through lambda = c - r cos(t), t in [t0, t1],
/// so that square-root edge behaviour at lo = c - r and hi = c + r becomes
/// smooth in t. Weights include the Jacobian r sin(t).
QuadratureRule cosine_mapped_rule(double lo, double hi, int n, double t0, double t1);
QuadratureRule cosine_mapped_rule(double lo, double hi, int n);

}  // namespace roamp
