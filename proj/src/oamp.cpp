#include "roamp/oamp.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "roamp/errors.hpp"

namespace roamp {

namespace {

// Iterate strengths closer to 1 are evaluated at this value; the channel
// is then effectively noiseless.
constexpr double kMaxStrength = 1.0 - 1e-12;
constexpr double kMinStrength = 1e-14;

void require_finite(const Eigen::VectorXd& x, const char* name, int t) {
  if (!x.allFinite()) throw DivergenceError(std::string(name) + " has non-finite entries", t);
}

Eigen::VectorXd apply_channel(const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                              const std::function<double(double, double)>& fn) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = fn(x[i], c[i]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpectralAction

Eigen::VectorXd SpectralAction::evaluate(const std::function<double(double)>& h) const {
  Eigen::VectorXd out(svd_->sigma.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double lambda = svd_->sigma[i] * svd_->sigma[i];
    out[i] = h(lambda);
    if (!std::isfinite(out[i])) {
      std::ostringstream os;
      os.precision(17);
      os << "matrix denoiser is not finite at eigenvalue " << lambda;
      throw DomainError(os.str());
    }
  }
  return out;
}

Eigen::VectorXd SpectralAction::left(const Eigen::VectorXd& h, const Eigen::VectorXd& x) const {
  const Eigen::VectorXd c = svd_->U.transpose() * x;
  return svd_->U * h.cwiseProduct(c);
}

Eigen::VectorXd SpectralAction::right(const Eigen::VectorXd& h, double h0, const Eigen::VectorXd& y) const {
  const Eigen::VectorXd c = svd_->V.transpose() * y;
  Eigen::VectorXd out = h0 * y;
  out.noalias() += svd_->V * (h.array() - h0).matrix().cwiseProduct(c);
  return out;
}

Eigen::VectorXd SpectralAction::left_cross(const Eigen::VectorXd& h, const Eigen::VectorXd& g) const {
  const Eigen::VectorXd c = svd_->V.transpose() * g;
  return svd_->U * h.cwiseProduct(svd_->sigma).cwiseProduct(c);
}

Eigen::VectorXd SpectralAction::right_cross(const Eigen::VectorXd& h, const Eigen::VectorXd& f) const {
  const Eigen::VectorXd c = svd_->U.transpose() * f;
  return svd_->V * h.cwiseProduct(svd_->sigma).cwiseProduct(c);
}

Eigen::VectorXd SpectralAction::apply(const std::function<double(double)>& h, Side side,
                                      double h_at_zero, const Eigen::VectorXd& x) const {
  const Eigen::VectorXd values = evaluate(h);
  if (side == Side::Left) return left(values, x);
  if (svd_->N() > svd_->M() && !std::isfinite(h_at_zero))
    throw DomainError("matrix denoiser is not finite at eigenvalue 0");
  return right(values, h_at_zero, x);
}

// ---------------------------------------------------------------------------
// DenoiserSet

DenoiserSet::DenoiserSet(const InducedMeasures& measures, double rho1, double rho2)
    : measures_(&measures), rho1_(rho1), rho2_(rho2) {
  auto invalid = [&](const std::string& what) {
    std::ostringstream os;
    os.precision(17);
    os << "optimal denoisers: " << what << " (theta=" << measures.theta() << ", rho1=" << rho1
       << ", rho2=" << rho2 << ")";
    return InconsistencyError(os.str());
  };
  if (!(rho1 >= 0.0 && rho2 >= 0.0) || !std::isfinite(rho1) || !std::isfinite(rho2))
    throw invalid("rho must be finite and non-negative");
  for (const ShrinkageTerms& t : measures.shrinkage().node_terms()) {
    const double k = kernel(t);
    if (!(k > 0.0) || !std::isfinite(k)) throw invalid("D(lambda) <= 0 on the support");
  }
  p_norm_ = measures.integrate_terms(Measure::Mu, [&](const ShrinkageTerms& t) { return P(t); });
  q_norm_ = measures.integrate_terms(Measure::MuTilde, [&](const ShrinkageTerms& t) { return Q(t); });
  r1_mean_ = measures.integrate_terms(Measure::Mu, [&](const ShrinkageTerms& t) { return R1(t); });
  r2_mean_ = measures.integrate_terms(Measure::MuTilde, [&](const ShrinkageTerms& t) { return R2(t); });
  if (!(p_norm_ > 0.0) || !std::isfinite(p_norm_)) throw invalid("<P*>_mu is not positive");
  if (!(q_norm_ > 0.0) || !std::isfinite(q_norm_)) throw invalid("<Q*>_mu~ is not positive");
}

// D(lambda) * den = lambda * kernel for lambda > 0.
double DenoiserSet::kernel(const ShrinkageTerms& t) const {
  const double d = measures_->delta();
  return rho1_ * rho2_ * d + d * rho1_ * t.n1 + rho2_ * t.n2 + d * t.den;
}

double DenoiserSet::D(const ShrinkageTerms& t) const {
  if (t.at_zero) return 0.0;
  return t.lambda * kernel(t) / t.den;
}

double DenoiserSet::P(const ShrinkageTerms& t) const {
  if (t.at_zero) return 0.0;
  return (rho2_ * t.n2 + measures_->delta() * t.den) / kernel(t);
}

double DenoiserSet::P_tilde(const ShrinkageTerms& t) const {
  if (t.at_zero) return 0.0;
  return std::sqrt(measures_->delta()) * rho2_ * t.n3 / (t.lambda * kernel(t));
}

double DenoiserSet::Q(const ShrinkageTerms& t) const {
  const double d = measures_->delta();
  if (t.at_zero) return d / (rho2_ * t.phi2() + d);
  return d * (rho1_ * t.n1 + t.den) / kernel(t);
}

double DenoiserSet::Q_tilde(const ShrinkageTerms& t) const {
  if (t.at_zero) return 0.0;
  return std::sqrt(measures_->delta()) * rho1_ * t.n3 / (t.lambda * kernel(t));
}

double DenoiserSet::R1(const ShrinkageTerms& t) const {
  return measures_->delta() * (rho2_ + t.n1) / kernel(t);
}

double DenoiserSet::R2(const ShrinkageTerms& t) const {
  const double d = measures_->delta();
  if (t.at_zero) return t.phi2() / (rho2_ * t.phi2() + d);
  return (rho1_ * d + t.n2) / kernel(t);
}

double DenoiserSet::F(const ShrinkageTerms& t) const {
  return (1.0 + rho1_) * (R1(t) - r1_mean_) / p_norm_;
}

double DenoiserSet::F_tilde(const ShrinkageTerms& t) const {
  if (t.at_zero) return 0.0;
  return (1.0 + rho2_) * std::sqrt(measures_->delta()) * t.n3 / (t.lambda * kernel(t) * p_norm_);
}

double DenoiserSet::G(const ShrinkageTerms& t) const {
  return (1.0 + rho2_) * (R2(t) - r2_mean_) / q_norm_;
}

double DenoiserSet::G_tilde(const ShrinkageTerms& t) const {
  if (t.at_zero) return 0.0;
  return (1.0 + rho1_) * std::sqrt(measures_->delta()) * t.n3 / (t.lambda * kernel(t) * q_norm_);
}

MatrixDenoisers DenoiserSet::as_matrix_denoisers() const {
  return {[this](const ShrinkageTerms& t) { return F(t); },
          [this](const ShrinkageTerms& t) { return F_tilde(t); },
          [this](const ShrinkageTerms& t) { return G(t); },
          [this](const ShrinkageTerms& t) { return G_tilde(t); }};
}

DenoiserSet build_optimal_denoisers(const InducedMeasures& measures, double rho1, double rho2) {
  return DenoiserSet(measures, rho1, rho2);
}

// ---------------------------------------------------------------------------
// Runs

double cos2(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double nx = x.squaredNorm();
  const double ny = y.squaredNorm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  const double ip = x.dot(y);
  return ip * ip / (nx * ny);
}

IterationTrace optimal_oamp_run(const ProblemInstance& inst, const SvdCache& svd,
                                const InducedMeasures& measures, std::span<const SeState> se, int T,
                                const RunOptions& opts) {
  if (static_cast<int>(se.size()) < T + 1)
    throw DomainError("optimal_oamp_run: state evolution shorter than the requested iterations");
  const SpectralAction act(svd);
  const int M = inst.M;
  const int N = inst.N;

  // Shrinkage terms at the empirical eigenvalues do not depend on rho.
  std::vector<ShrinkageTerms> terms(M);
  for (int i = 0; i < M; ++i) terms[i] = measures.empirical_terms(svd.sigma[i] * svd.sigma[i]);
  const ShrinkageTerms zero = measures.shrinkage().zero_terms();

  auto channel = [](const PriorModel& p, double w) {
    return ScalarChannel(p, std::clamp(w, 0.0, kMaxStrength));
  };
  auto dmmse_of = [](const ScalarChannel& ch, const Eigen::VectorXd& x, const Eigen::VectorXd& c) {
    return apply_channel(x, c, [&](double xi, double ci) { return ch.dmmse(xi, ci); });
  };

  Eigen::VectorXd f_prev = dmmse_of(channel(inst.prior_u, 0.0), Eigen::VectorXd::Zero(M), inst.a);
  Eigen::VectorXd g_prev = dmmse_of(channel(inst.prior_v, 0.0), Eigen::VectorXd::Zero(N), inst.b);

  IterationTrace trace;
  Eigen::VectorXd hF(M), hFt(M), hG(M), hGt(M);
  for (int t = 1; t <= T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    const SeState& s = se[t];
    const DenoiserSet den(measures, s.rho1, s.rho2);
    for (int i = 0; i < M; ++i) {
      hF[i] = den.F(terms[i]);
      hFt[i] = den.F_tilde(terms[i]);
      hG[i] = den.G(terms[i]);
      hGt[i] = den.G_tilde(terms[i]);
    }
    if (!hF.allFinite() || !hFt.allFinite() || !hG.allFinite() || !hGt.allFinite())
      throw DivergenceError("optimal_oamp_run: matrix denoiser not finite at an empirical eigenvalue", t);

    Eigen::VectorXd u = Eigen::VectorXd::Zero(M);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
    if (s.w1 > kMinStrength) u = (act.left(hF, f_prev) + act.left_cross(hFt, g_prev)) / std::sqrt(s.w1);
    if (s.w2 > kMinStrength) v = (act.right(hG, den.G(zero), g_prev) + act.right_cross(hGt, f_prev)) / std::sqrt(s.w2);
    require_finite(u, "u", t);
    require_finite(v, "v", t);

    const ScalarChannel cu = channel(inst.prior_u, s.w1 > kMinStrength ? s.w1 : 0.0);
    const ScalarChannel cv = channel(inst.prior_v, s.w2 > kMinStrength ? s.w2 : 0.0);
    const Eigen::VectorXd u_hat =
        apply_channel(u, inst.a, [&](double x, double c) { return cu.posterior_mean(x, c); });
    const Eigen::VectorXd v_hat =
        apply_channel(v, inst.b, [&](double x, double c) { return cv.posterior_mean(x, c); });

    IterationRecord r;
    r.t = t;
    r.cos2_u = cos2(u_hat, inst.u_star);
    r.cos2_v = cos2(v_hat, inst.v_star);
    r.mse_u = (u_hat - inst.u_star).squaredNorm() / M;
    r.mse_v = (v_hat - inst.v_star).squaredNorm() / N;
    r.pred_w1 = s.w1;
    r.pred_w2 = s.w2;
    r.pred_mmse_u = s.mmse_u;
    r.pred_mmse_v = s.mmse_v;
    r.pred_cos2_u = 1.0 - s.mmse_u;
    r.pred_cos2_v = 1.0 - s.mmse_v;

    f_prev = dmmse_of(cu, u, inst.a);
    g_prev = dmmse_of(cv, v, inst.b);
    require_finite(f_prev, "f", t);
    require_finite(g_prev, "g", t);
    if (opts.store_iterates) {
      trace.u_iterates.push_back(std::move(u));
      trace.v_iterates.push_back(std::move(v));
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(r);
  }
  return trace;
}

void validate_spec(const GeneralOampSpec& spec, const SpectrumModel& spectrum,
                   const PriorModel& prior_u, const PriorModel& prior_v) {
  for (std::size_t k = 0; k < spec.steps.size(); ++k) {
    const GeneralOampStep& st = spec.steps[k];
    const int t = static_cast<int>(k) + 1;
    const double trace_f = spectrum.integrate(st.F.h);
    const double trace_g = spectrum.integrate_tilde([&](double lambda) {
      return lambda == 0.0 ? st.G.at_zero : st.G.h(lambda);
    });
    if (!(std::abs(trace_f) <= 1e-8))
      throw InconsistencyError("general OAMP: F_" + std::to_string(t) + " is not trace-free");
    if (!(std::abs(trace_g) <= 1e-8))
      throw InconsistencyError("general OAMP: G_" + std::to_string(t) + " is not trace-free");

    auto divergence = [](const PriorModel& prior, const IterateDenoiser& d) {
      const double h = 1e-5;
      return expect_under(prior, *d.law, [&](double, double x, double c) {
        return (d.fn(x + h, c) - d.fn(x - h, c)) / (2.0 * h);
      });
    };
    if (st.f.law && t > 1 && !(std::abs(divergence(prior_u, st.f)) <= 1e-3))
      throw InconsistencyError("general OAMP: f_" + std::to_string(t) + " is not divergence-free");
    if (st.g.law && t > 1 && !(std::abs(divergence(prior_v, st.g)) <= 1e-3))
      throw InconsistencyError("general OAMP: g_" + std::to_string(t) + " is not divergence-free");
  }
}

IterationTrace general_oamp_run(const ProblemInstance& inst, const SvdCache& svd,
                                const GeneralOampSpec& spec, int T, const RunOptions& opts) {
  if (static_cast<int>(spec.steps.size()) < T)
    throw DomainError("general_oamp_run: spec has fewer steps than requested iterations");
  const SpectralAction act(svd);
  const int M = inst.M;
  const int N = inst.N;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
  IterationTrace trace;
  for (int t = 1; t <= T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    const GeneralOampStep& st = spec.steps[t - 1];
    const Eigen::VectorXd f = apply_channel(u, inst.a, st.f.fn);
    const Eigen::VectorXd g = apply_channel(v, inst.b, st.g.fn);
    require_finite(f, "f", t);
    require_finite(g, "g", t);
    const Eigen::VectorXd u_next =
        act.left(act.evaluate(st.F.h), f) + act.left_cross(act.evaluate(st.F_tilde.h), g);
    const Eigen::VectorXd v_next = act.right(act.evaluate(st.G.h), st.G.at_zero, g) +
                                   act.right_cross(act.evaluate(st.G_tilde.h), f);
    u = u_next;
    v = v_next;
    require_finite(u, "u", t);
    require_finite(v, "v", t);
    const Eigen::VectorXd u_hat = apply_channel(u, inst.a, st.phi_u);
    const Eigen::VectorXd v_hat = apply_channel(v, inst.b, st.phi_v);

    IterationRecord r;
    r.t = t;
    r.cos2_u = cos2(u_hat, inst.u_star);
    r.cos2_v = cos2(v_hat, inst.v_star);
    r.mse_u = (u_hat - inst.u_star).squaredNorm() / M;
    r.mse_v = (v_hat - inst.v_star).squaredNorm() / N;
    r.pred_cos2_u = st.pred_cos2_u;
    r.pred_cos2_v = st.pred_cos2_v;
    if (opts.store_iterates) {
      trace.u_iterates.push_back(u);
      trace.v_iterates.push_back(v);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(r);
  }
  return trace;
}

GeneralOampSpec optimal_spec(const InducedMeasures& measures, const PriorModel& prior_u,
                             const PriorModel& prior_v, std::span<const SeState> se, int T) {
  if (static_cast<int>(se.size()) < T + 1)
    throw DomainError("optimal_spec: state evolution shorter than the requested iterations");
  GeneralOampSpec spec;
  auto make_channel = [](const PriorModel& p, double w) {
    return std::make_shared<const ScalarChannel>(p, w > kMinStrength ? std::clamp(w, 0.0, kMaxStrength) : 0.0);
  };
  for (int t = 1; t <= T; ++t) {
    const SeState& s = se[t];
    const SeState& prev = se[t - 1];
    auto den = std::make_shared<const DenoiserSet>(measures, s.rho1, s.rho2);
    const double su = s.w1 > kMinStrength ? 1.0 / std::sqrt(s.w1) : 0.0;
    const double sv = s.w2 > kMinStrength ? 1.0 / std::sqrt(s.w2) : 0.0;
    const InducedMeasures* nu = &measures;
    GeneralOampStep st;
    st.F.h = [den, nu, su](double l) { return su * den->F(nu->empirical_terms(l)); };
    st.F_tilde.h = [den, nu, su](double l) { return su * den->F_tilde(nu->empirical_terms(l)); };
    st.G.h = [den, nu, sv](double l) { return sv * den->G(nu->empirical_terms(l)); };
    st.G.at_zero = sv * den->G(nu->shrinkage().zero_terms());
    st.G_tilde.h = [den, nu, sv](double l) { return sv * den->G_tilde(nu->empirical_terms(l)); };

    auto fin = make_channel(prior_u, prev.w1);
    auto gin = make_channel(prior_v, prev.w2);
    st.f.fn = [fin](double x, double c) { return fin->dmmse(x, c); };
    st.g.fn = [gin](double x, double c) { return gin->dmmse(x, c); };
    if (t > 1) {
      st.f.law = ChannelLaw{prev.mu_u, prev.sigma_u};
      st.g.law = ChannelLaw{prev.mu_v, prev.sigma_v};
    }
    auto fout = make_channel(prior_u, s.w1);
    auto gout = make_channel(prior_v, s.w2);
    st.phi_u = [fout](double x, double c) { return fout->posterior_mean(x, c); };
    st.phi_v = [gout](double x, double c) { return gout->posterior_mean(x, c); };
    st.pred_cos2_u = 1.0 - s.mmse_u;
    st.pred_cos2_v = 1.0 - s.mmse_v;
    spec.steps.push_back(std::move(st));
  }
  return spec;
}

}  // namespace roamp
