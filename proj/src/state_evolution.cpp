#include "roamp/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "roamp/errors.hpp"
#include "roamp/oamp.hpp"
#include "roamp/quadrature.hpp"

namespace roamp {

namespace {

std::string dump(const SeState& s) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << s.t << " rho1=" << s.rho1 << " rho2=" << s.rho2 << " w1=" << s.w1
     << " w2=" << s.w2 << " <P*>=" << s.p_norm << " <Q*>=" << s.q_norm;
  return os.str();
}

double checked_variance(double v, const char* name) {
  if (v < -1e-10) throw InconsistencyError(std::string("se_step_general: negative ") + name);
  return std::max(v, 0.0);
}

double rho_from(const PriorModel& prior, double w, double cap) {
  if (w >= 1.0) return cap;
  const double m = mmse_with_side_info(prior, w);
  if (m <= 0.0) return cap;
  const double r = 1.0 / m - 1.0 / (1.0 - w);
  if (r < -1e-9 / m) {
    throw InconsistencyError("optimal_se_run: mmse exceeds the Gaussian-channel floor at w = " +
                             std::to_string(w));
  }
  return std::clamp(r, 0.0, cap);
}

double checked_w(double w, const SeState& s, const char* name) {
  if (!(w >= -1e-9 && w <= 1.0 + 1e-9)) {
    throw InconsistencyError(std::string("optimal_se_run: ") + name + " left [0, 1]: " + dump(s));
  }
  return std::clamp(w, 0.0, 1.0);
}

ChannelStats dmmse_stats(const PriorModel& prior, double w) {
  const ScalarChannel ch(prior, std::min(w, 1.0 - 1e-12));
  return ch.stats([&](double x, double c) { return ch.dmmse(x, c); });
}

}  // namespace

double expect_under(const PriorModel& prior, const ChannelLaw& law,
                    const std::function<double(double, double, double)>& g,
                    const ChannelOptions& opts) {
  const QuadratureRule& gh = gauss_hermite_normal(opts.hermite_nodes);
  static const QuadratureRule kSigns{{-1.0, 1.0}, {0.5, 0.5}};
  static const QuadratureRule kOrigin{{0.0}, {1.0}};
  const double w0 = prior.side_info_strength;
  const QuadratureRule& xs_rule =
      prior.kind == PriorKind::Rademacher ? kSigns : gauss_hermite_normal(opts.prior_nodes);
  const QuadratureRule& z_rule = law.sd > 0.0 ? gh : kOrigin;
  const QuadratureRule& zc_rule = w0 > 0.0 ? gh : kOrigin;
  const double a0 = std::sqrt(w0);
  const double b0 = std::sqrt(1.0 - w0);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs_rule.size(); ++i) {
    const double xs = xs_rule.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < z_rule.size(); ++j) {
      const double u = law.mean * xs + law.sd * z_rule.nodes[j];
      double row = 0.0;
      for (std::size_t k = 0; k < zc_rule.size(); ++k)
        row += zc_rule.weights[k] * g(xs, u, a0 * xs + b0 * zc_rule.nodes[k]);
      inner += z_rule.weights[j] * row;
    }
    sum += xs_rule.weights[i] * inner;
  }
  return sum;
}

SeState se_step_general(const InducedMeasures& nu, const PriorModel& prior_u,
                        const PriorModel& prior_v, const ChannelLaw& law_u, const ChannelLaw& law_v,
                        const IterateFn& f, const IterateFn& g, const MatrixDenoisers& m,
                        const ChannelOptions& opts) {
  SeState s;
  s.alpha = expect_under(prior_u, law_u, [&](double xs, double u, double c) { return xs * f(u, c); }, opts);
  const double ef2 = expect_under(prior_u, law_u, [&](double, double u, double c) {
    const double v = f(u, c);
    return v * v;
  }, opts);
  s.beta = expect_under(prior_v, law_v, [&](double xs, double v, double c) { return xs * g(v, c); }, opts);
  const double eg2 = expect_under(prior_v, law_v, [&](double, double v, double c) {
    const double r = g(v, c);
    return r * r;
  }, opts);
  s.sigma_f2 = checked_variance(ef2 - s.alpha * s.alpha, "sigma_f^2");
  s.sigma_g2 = checked_variance(eg2 - s.beta * s.beta, "sigma_g^2");

  const double d = nu.delta();
  const double a = s.alpha;
  const double b = s.beta;
  auto sq = [](const TermFn& h) { return [&h](const ShrinkageTerms& t) { double v = h(t); return v * v; }; };
  auto lam_sq = [](const TermFn& h) {
    return [&h](const ShrinkageTerms& t) { double v = h(t); return t.lambda * v * v; };
  };
  auto prod = [](const TermFn& h1, const TermFn& h2) {
    return [&h1, &h2](const ShrinkageTerms& t) { return h1(t) * h2(t); };
  };

  s.mu_u = a * nu.integrate_terms(Measure::Nu1, m.F) +
           b * (1.0 + 1.0 / d) * nu.integrate_nu3_sigma(m.F_tilde);
  s.mu_v = b * nu.integrate_terms(Measure::Nu2, m.G) +
           a * (1.0 + d) * nu.integrate_nu3_sigma(m.G_tilde);

  const double var_u = a * a * nu.integrate_terms(Measure::Nu1, sq(m.F)) +
                       b * b / d * nu.integrate_terms(Measure::Nu2, lam_sq(m.F_tilde)) +
                       s.sigma_f2 * nu.integrate_terms(Measure::Mu, sq(m.F)) +
                       2.0 * a * b * (1.0 + 1.0 / d) * nu.integrate_nu3_sigma(prod(m.F, m.F_tilde)) -
                       s.mu_u * s.mu_u +
                       s.sigma_g2 / d * nu.integrate_terms(Measure::MuTilde, lam_sq(m.F_tilde));
  const double var_v = b * b * nu.integrate_terms(Measure::Nu2, sq(m.G)) +
                       a * a * d * nu.integrate_terms(Measure::Nu1, lam_sq(m.G_tilde)) +
                       s.sigma_f2 * d * nu.integrate_terms(Measure::Mu, lam_sq(m.G_tilde)) +
                       2.0 * a * b * (1.0 + d) * nu.integrate_nu3_sigma(prod(m.G, m.G_tilde)) -
                       s.mu_v * s.mu_v + s.sigma_g2 * nu.integrate_terms(Measure::MuTilde, sq(m.G));
  s.sigma_u = std::sqrt(checked_variance(var_u, "sigma_u^2"));
  s.sigma_v = std::sqrt(checked_variance(var_v, "sigma_v^2"));
  return s;
}

double mmse_with_side_info(const PriorModel& prior, double w) {
  return mmse_single(prior.kind, combined_strength(w, prior.side_info_strength));
}

double predicted_cos2(const PriorModel& prior, double w) { return 1.0 - mmse_with_side_info(prior, w); }

OptimalSeResult optimal_se_run(const InducedMeasures& measures, const PriorModel& prior_u,
                               const PriorModel& prior_v, int T, const OptimalSeOptions& opts) {
  if (T < 1) throw DomainError("optimal_se_run: T must be >= 1");
  OptimalSeResult out;
  SeState init;
  init.mmse_u = mmse_with_side_info(prior_u, 0.0);
  init.mmse_v = mmse_with_side_info(prior_v, 0.0);
  out.states.push_back(init);

  for (int t = 1; t <= T; ++t) {
    const SeState& prev = out.states.back();
    SeState s;
    s.t = t;
    s.rho1 = rho_from(prior_u, prev.w1, opts.rho_cap);
    s.rho2 = rho_from(prior_v, prev.w2, opts.rho_cap);
    const DenoiserSet den(measures, s.rho1, s.rho2);
    s.p_norm = den.p_norm();
    s.q_norm = den.q_norm();
    s.w1 = checked_w(den.next_w1(), s, "w1");
    s.w2 = checked_w(den.next_w2(), s, "w2");
    s.mmse_u = mmse_with_side_info(prior_u, s.w1);
    s.mmse_v = mmse_with_side_info(prior_v, s.w2);
    s.mu_u = std::sqrt(s.w1);
    s.sigma_u = std::sqrt(1.0 - s.w1);
    s.mu_v = std::sqrt(s.w2);
    s.sigma_v = std::sqrt(1.0 - s.w2);
    const ChannelStats fs = dmmse_stats(prior_u, prev.w1);
    const ChannelStats gs = dmmse_stats(prior_v, prev.w2);
    s.alpha = fs.alpha;
    s.beta = gs.alpha;
    s.sigma_f2 = std::max(0.0, fs.variance());
    s.sigma_g2 = std::max(0.0, gs.variance());

    if (s.w1 < prev.w1 - 1e-10 || s.w2 < prev.w2 - 1e-10) {
      if (out.monotone) spdlog::warn("optimal_se_run: w decreased at t = {} ({})", t, dump(s));
      out.monotone = false;
    }
    const double change = std::max(std::abs(s.w1 - prev.w1), std::abs(s.w2 - prev.w2));
    out.states.push_back(s);
    if (out.plateau_iteration < 0 && change <= opts.plateau_tolerance) {
      out.plateau_iteration = t;
      if (opts.stop_at_plateau) break;
    }
  }
  return out;
}

namespace {

struct FpIterate {
  double w1;
  double w2;
  int iterations;
};

FpIterate iterate_fixed_point(double theta, double delta, const PriorModel& pu, const PriorModel& pv,
                              double w1, double w2, const FixedPointOptions& opts) {
  const double th2 = theta * theta;
  auto map_w1 = [&](double w2v) {
    const double snr = th2 / delta * (1.0 - mmse_with_side_info(pv, w2v));
    return snr / (1.0 + snr);
  };
  auto map_w2 = [&](double w1v) {
    const double snr = th2 * (1.0 - mmse_with_side_info(pu, w1v));
    return snr / (1.0 + snr);
  };
  double p1 = w1;
  double p2 = w2;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    p1 = w1;
    p2 = w2;
    w1 = (1.0 - opts.damping) * w1 + opts.damping * map_w1(w2);
    w2 = (1.0 - opts.damping) * w2 + opts.damping * map_w2(w1);
    if (std::abs(w1 - p1) <= opts.tolerance && std::abs(w2 - p2) <= opts.tolerance) return {w1, w2, it};
  }
  std::ostringstream os;
  os.precision(17);
  os << "gaussian_fixed_point: no convergence in " << opts.max_iterations << " steps; last states (" << p1
     << ", " << p2 << ") and (" << w1 << ", " << w2 << ")";
  throw ConvergenceError(os.str());
}

}  // namespace

FixedPointResult gaussian_fixed_point(double theta, double delta, const PriorModel& prior_u,
                                      const PriorModel& prior_v, const FixedPointOptions& opts) {
  if (!(theta > 0.0)) throw DomainError("gaussian_fixed_point: theta must be > 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("gaussian_fixed_point: delta must lie in (0, 1]");
  const FpIterate lo = iterate_fixed_point(theta, delta, prior_u, prior_v, 0.0, 0.0, opts);
  FixedPointResult r;
  r.w1 = lo.w1;
  r.w2 = lo.w2;
  r.iterations = lo.iterations;
  r.mmse_u = mmse_with_side_info(prior_u, r.w1);
  r.mmse_v = mmse_with_side_info(prior_v, r.w2);
  const double top = 1.0 - 1e-9;
  const FpIterate hi = iterate_fixed_point(theta, delta, prior_u, prior_v, top, top, opts);
  r.alt_w1 = hi.w1;
  r.alt_w2 = hi.w2;
  if (std::abs(hi.w1 - lo.w1) > 1e-6 || std::abs(hi.w2 - lo.w2) > 1e-6) {
    r.multiple = true;
    spdlog::info("gaussian_fixed_point: multiple fixed points, ({}, {}) from below and ({}, {}) from above",
                 lo.w1, lo.w2, hi.w1, hi.w2);
  }
  return r;
}

}  // namespace roamp
