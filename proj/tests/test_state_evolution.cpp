#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "roamp/errors.hpp"
#include "roamp/oamp.hpp"
#include "roamp/state_evolution.hpp"

using namespace roamp;

namespace {

const PriorModel kRad{PriorKind::Rademacher, 0.0};
const PriorModel kRadSide{PriorKind::Rademacher, 0.04};

// mmse of a Rademacher sign seen through a Gaussian channel of strength w
// combined with side information of strength w0, by the trapezoid rule.
double oracle_mmse(double w, double w0) {
  const double s = w / (1.0 - w) + w0 / (1.0 - w0);
  if (s == 0.0) return 1.0;
  return 1.0 - oracle::gaussian_expectation(
                   [s](double z) { return std::tanh(s + std::sqrt(s) * z); }, 40001);
}

// Undamped alternating iteration of the fixed-point system from w = 0.
std::pair<double, double> oracle_fixed_point(double theta, double delta, double w0) {
  const double t2 = theta * theta;
  double w1 = 0.0, w2 = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double s1 = t2 / delta * (1.0 - oracle_mmse(w2, w0));
    const double n1 = s1 / (1.0 + s1);
    const double s2 = t2 * (1.0 - oracle_mmse(n1, w0));
    const double n2 = s2 / (1.0 + s2);
    const bool done = std::abs(n1 - w1) < 1e-14 && std::abs(n2 - w2) < 1e-14;
    w1 = n1;
    w2 = n2;
    if (done) break;
  }
  return {w1, w2};
}

const InducedMeasures& mp_measures() {
  static const InducedMeasures nu =
      build_induced_measures(ShrinkageSet(SpectrumModel::marchenko_pastur(0.5), 2.0));
  return nu;
}

const OptimalSeResult& mp_run() {
  static const OptimalSeResult r = optimal_se_run(mp_measures(), kRadSide, kRadSide, 40);
  return r;
}

}  // namespace

TEST_CASE("expectations under a channel law") {
  const ChannelLaw law{0.6, 0.8};
  CHECK(law.second_moment() == doctest::Approx(1.0));
  CHECK(expect_under(kRad, law, [](double xs, double u, double) { return xs * u; }) ==
        doctest::Approx(0.6).epsilon(1e-13));
  CHECK(expect_under(kRad, law, [](double, double u, double) { return u * u; }) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(expect_under(kRadSide, law, [](double xs, double, double c) { return xs * c; }) ==
        doctest::Approx(0.2).epsilon(1e-13));
  const PriorModel g{PriorKind::UnitGaussian, 0.0};
  CHECK(expect_under(g, law, [](double xs, double, double) { return xs * xs * xs * xs; }) ==
        doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("general step with vanishing u-side matrix denoisers") {
  const InducedMeasures& nu = mp_measures();
  const DenoiserSet den(nu, 1.0, 1.0);
  MatrixDenoisers m = den.as_matrix_denoisers();
  m.F = [](const ShrinkageTerms&) { return 0.0; };
  m.F_tilde = [](const ShrinkageTerms&) { return 0.0; };
  const ScalarChannel ch(kRadSide, 0.3);
  const IterateFn f = [&](double x, double c) { return ch.dmmse(x, c); };
  const ChannelLaw law{std::sqrt(0.3), std::sqrt(0.7)};
  const SeState s = se_step_general(nu, kRadSide, kRadSide, law, law, f, f, m);
  CHECK(s.mu_u == 0.0);
  CHECK(s.sigma_u == 0.0);
  CHECK(s.mu_v != 0.0);
  CHECK(s.sigma_f2 >= 0.0);
}

TEST_CASE("general step at zero SNR reduces to the noise terms") {
  const double delta = 0.5;
  const SpectrumModel mp = SpectrumModel::marchenko_pastur(delta);
  const InducedMeasures nu = build_induced_measures(ShrinkageSet(mp, 0.0));
  CHECK(nu.atoms().empty());
  const double mean_lambda = mp.integrate([](double l) { return l; });
  MatrixDenoisers m;
  m.F = [=](const ShrinkageTerms& t) { return t.lambda - mean_lambda; };
  m.F_tilde = [](const ShrinkageTerms& t) { return 1.0 + 0.5 * t.lambda; };
  m.G = [](const ShrinkageTerms&) { return 0.0; };
  m.G_tilde = [](const ShrinkageTerms&) { return 0.0; };
  // Even functions of the iterate: alpha = beta = 0 under a symmetric prior.
  const IterateFn f = [](double x, double) { return x * x - 1.0; };
  const IterateFn g = [](double x, double) { return std::abs(x); };
  const ChannelLaw law{0.5, std::sqrt(0.75)};
  const SeState s = se_step_general(nu, kRad, kRad, law, law, f, g, m);
  CHECK(std::abs(s.alpha) < 1e-12);
  CHECK(std::abs(s.beta) < 1e-12);
  CHECK(std::abs(s.mu_u) < 1e-12);
  // U^2 - 1 = 0.75 (Z^2 - 1) + X* sqrt(0.75) Z, so E[f^2] = 0.75^2 * 2 + 0.75;
  // E[g^2] = E[U^2] = 1.
  CHECK(s.sigma_f2 == doctest::Approx(1.875).epsilon(1e-10));
  CHECK(s.sigma_g2 == doctest::Approx(1.0).epsilon(1e-10));
  const double a = 1.0 - std::sqrt(delta), b = 1.0 + std::sqrt(delta);
  auto rho = [=](double l) { return oracle::mp_density(l, delta); };
  const double f2 = oracle::edge_integral([&](double l) { return rho(l) * std::pow(l - mean_lambda, 2); }, a * a, b * b);
  const double lf2 = oracle::edge_integral(
      [&](double l) { return rho(l) * l * std::pow(1.0 + 0.5 * l, 2); }, a * a, b * b);
  // <lambda F~^2> over mu tilde: the atom at 0 contributes nothing.
  const double expected = s.sigma_f2 * f2 + s.sigma_g2 / delta * delta * lf2;
  CHECK(s.sigma_u * s.sigma_u == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("general step with the optimal denoisers reproduces the optimal recursion") {
  const InducedMeasures& nu = mp_measures();
  const OptimalSeResult& run = mp_run();
  for (int t = 1; t <= 3; ++t) {
    const SeState& prev = run.states[t - 1];
    const SeState& cur = run.states[t];
    const DenoiserSet den(nu, cur.rho1, cur.rho2);
    const ScalarChannel fu(kRadSide, prev.w1), fv(kRadSide, prev.w2);
    const IterateFn f = [&](double x, double c) { return fu.dmmse(x, c); };
    const IterateFn g = [&](double x, double c) { return fv.dmmse(x, c); };
    const ChannelLaw lu{std::sqrt(prev.w1), std::sqrt(1.0 - prev.w1)};
    const ChannelLaw lv{std::sqrt(prev.w2), std::sqrt(1.0 - prev.w2)};
    const SeState s = se_step_general(nu, kRadSide, kRadSide, lu, lv, f, g, den.as_matrix_denoisers());
    const double ratio_u = s.mu_u * s.mu_u / (s.mu_u * s.mu_u + s.sigma_u * s.sigma_u);
    const double ratio_v = s.mu_v * s.mu_v / (s.mu_v * s.mu_v + s.sigma_v * s.sigma_v);
    CHECK(ratio_u == doctest::Approx(cur.w1).epsilon(1e-6));
    CHECK(ratio_v == doctest::Approx(cur.w2).epsilon(1e-6));
    CHECK(s.alpha == doctest::Approx(cur.alpha).epsilon(1e-10));
    CHECK(s.beta == doctest::Approx(cur.beta).epsilon(1e-10));
  }
}

TEST_CASE("near-perfect side information stays near perfect") {
  const PriorModel p{PriorKind::Rademacher, 1.0 - 1e-9};
  const OptimalSeResult r = optimal_se_run(mp_measures(), p, p, 5);
  for (const SeState& s : r.states) {
    CHECK(s.mmse_u <= 1e-6);
    CHECK(s.mmse_v <= 1e-6);
  }
  for (std::size_t t = 1; t < r.states.size(); ++t) {
    CHECK(r.states[t].w1 >= 0.0);
    CHECK(r.states[t].w1 <= 1.0);
  }
}

TEST_CASE("the MP limit solves the Gaussian fixed-point system") {
  const OptimalSeResult& run = mp_run();
  const SeState& last = run.last();
  const double t2 = 4.0, delta = 0.5, w0 = 0.04;
  const double r1 = oracle_mmse(last.w1, w0) - (1.0 - last.w2 / (t2 * (1.0 - last.w2)));
  const double r2 = oracle_mmse(last.w2, w0) - (1.0 - delta * last.w1 / (t2 * (1.0 - last.w1)));
  CHECK(std::abs(r1) <= 1e-8);
  CHECK(std::abs(r2) <= 1e-8);

  const FixedPointResult fp = gaussian_fixed_point(2.0, 0.5, kRadSide, kRadSide);
  CHECK(std::abs(last.w1 - fp.w1) <= 1e-6);
  CHECK(std::abs(last.w2 - fp.w2) <= 1e-6);
  CHECK(std::abs(last.mmse_u - fp.mmse_u) <= 1e-6);
  CHECK(std::abs(last.mmse_v - fp.mmse_v) <= 1e-6);
  CHECK_FALSE(fp.multiple);

  const auto [o1, o2] = oracle_fixed_point(2.0, 0.5, w0);
  CHECK(std::abs(fp.w1 - o1) <= 1e-8);
  CHECK(std::abs(fp.w2 - o2) <= 1e-8);
}

TEST_CASE("optimal recursion properties") {
  const OptimalSeResult& run = mp_run();
  CHECK(run.monotone);
  CHECK(run.plateau_iteration > 0);
  CHECK(run.plateau_iteration <= 20);
  const std::size_t n = run.states.size();
  CHECK(std::abs(run.states[n - 1].w1 - run.states[n - 2].w1) <= 1e-10);
  CHECK(std::abs(run.states[n - 1].w2 - run.states[n - 2].w2) <= 1e-10);
  for (std::size_t t = 1; t < n; ++t) {
    const SeState& s = run.states[t];
    CHECK(s.rho1 > 0.0);
    CHECK(s.rho2 > 0.0);
    CHECK(s.w1 >= run.states[t - 1].w1 - 1e-12);
    CHECK(s.mmse_u >= 0.0);
    CHECK(s.mmse_u <= 1.0);
    CHECK(s.sigma_f2 >= 0.0);
  }
  // Most of the gain is in place after ten iterations.
  CHECK(std::abs(predicted_cos2(kRadSide, run.states[10].w1) - predicted_cos2(kRadSide, run.last().w1)) <= 1e-4);
  CHECK(predicted_cos2(kRadSide, run.states[1].w1) < predicted_cos2(kRadSide, run.states[5].w1));

  OptimalSeOptions early;
  early.stop_at_plateau = true;
  const OptimalSeResult stopped = optimal_se_run(mp_measures(), kRadSide, kRadSide, 40, early);
  CHECK(static_cast<int>(stopped.states.size()) == stopped.plateau_iteration + 1);
  CHECK_THROWS_AS(optimal_se_run(mp_measures(), kRadSide, kRadSide, 0), DomainError);
}

TEST_CASE("gaussian fixed point limits") {
  // Without side information w = 0 is a fixed point for a symmetric prior;
  // the informative one is found from above.
  const FixedPointResult strong = gaussian_fixed_point(50.0, 0.5, kRadSide, kRadSide);
  CHECK(strong.mmse_u <= 1e-3);
  CHECK(strong.mmse_v <= 1e-3);
  const FixedPointResult bare = gaussian_fixed_point(50.0, 0.5, kRad, kRad);
  CHECK(bare.w1 == 0.0);
  CHECK(bare.multiple);
  CHECK(mmse_with_side_info(kRad, bare.alt_w1) <= 1e-3);
  const FixedPointResult weak = gaussian_fixed_point(0.01, 0.5, kRad, kRad);
  CHECK(weak.w1 <= 1e-12);
  CHECK(weak.mmse_u == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(gaussian_fixed_point(0.0, 0.5, kRad, kRad), DomainError);
  CHECK_THROWS_AS(gaussian_fixed_point(-1.0, 0.5, kRad, kRad), DomainError);
}

TEST_CASE("predicted squared cosine") {
  CHECK(predicted_cos2(kRad, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(predicted_cos2(kRadSide, 0.0) == doctest::Approx(1.0 - oracle_mmse(0.0, 0.04)).epsilon(1e-9));
  CHECK(mmse_with_side_info(kRadSide, 0.5) == doctest::Approx(oracle_mmse(0.5, 0.04)).epsilon(1e-9));
}
