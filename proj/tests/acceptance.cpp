// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "roamp/baselines.hpp"
#include "roamp/model.hpp"
#include "roamp/oamp.hpp"
#include "roamp/scalar_channel.hpp"
#include "roamp/spectra.hpp"
#include "roamp/state_evolution.hpp"
#include "roamp/stats.hpp"

using namespace roamp;

namespace {

constexpr double kTheta = 2.0;
constexpr double kDelta = 0.5;
constexpr int kM = 1000;
constexpr int kN = 2000;
constexpr int kSeeds = 20;
constexpr int kT = 10;
const PriorModel kPrior{PriorKind::Rademacher, 0.04};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string format(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string format(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

void report(int id, const char* name, const Outcome& o, double seconds, bool& all) {
  std::printf("%s  criterion %d  %-28s %s  [%.0f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              seconds);
  std::fflush(stdout);
  all = all && o.pass;
}

// Moments 0..3 of an empirical spectral measure.
std::array<double, 4> moments(const std::vector<WeightedPoint>& m) {
  return {moment(m, 0), moment(m, 1), moment(m, 2), moment(m, 3)};
}

struct MomentSamples {
  std::array<std::vector<double>, 4> nu1;
  std::array<std::vector<double>, 4> nu2;
  std::vector<double> zero_mass;

  void add(const EmpiricalSignalMeasures& e) {
    const auto a = moments(e.nu_M1);
    const auto b = moments(e.nu_N2);
    for (int k = 0; k < 4; ++k) {
      nu1[k].push_back(a[k]);
      nu2[k].push_back(b[k]);
    }
    double z = 0.0;
    for (const WeightedPoint& p : e.nu_N2)
      if (p.location == 0.0) z += p.weight;
    zero_mass.push_back(z);
  }
};

// Per-seed data shared between criteria on the Gaussian-noise configuration.
struct GaussianRuns {
  std::vector<IterationTrace> oamp;
  std::vector<BaselineResult> amp;
  std::vector<std::vector<double>> traces;  // |tr F*_t(YY^T)| / M per iteration
  std::vector<Eigen::VectorXd> u_star;
  MomentSamples moments;
};

double max_abs_dev(const std::vector<std::vector<double>>& per_seed, const std::vector<double>& target) {
  double worst = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    std::vector<double> col;
    for (const auto& s : per_seed) col.push_back(s[t]);
    worst = std::max(worst, std::abs(mean_se(col).mean - target[t]));
  }
  return worst;
}

Outcome compare_moments(const InducedMeasures& nu, const MomentSamples& s, const std::string& label) {
  Outcome o;
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double a1 = nu.inner_product(Measure::Nu1, [k](double l) { return std::pow(l, k); });
    const double a2 = nu.inner_product(Measure::Nu2, [k](double l) { return std::pow(l, k); });
    const MeanSe e1 = mean_se(s.nu1[k]);
    const MeanSe e2 = mean_se(s.nu2[k]);
    const double z1 = std::abs(e1.mean - a1) / std::max(e1.se, 1e-300);
    const double z2 = std::abs(e2.mean - a2) / std::max(e2.se, 1e-300);
    // Moment 0 is exact up to rounding on both sides.
    const bool ok1 = k == 0 ? std::abs(e1.mean - a1) <= 1e-6 : z1 <= 3.0;
    const bool ok2 = k == 0 ? std::abs(e2.mean - a2) <= 1e-6 : z2 <= 3.0;
    if (k > 0) worst = std::max({worst, z1, z2});
    if (!ok1 || !ok2) {
      o.pass = false;
      o.detail += " " + label + " k=" + std::to_string(k) + format(" nu1 %.6g vs %.6g", e1.mean, a1) +
                  format(" nu2 %.6g vs %.6g;", e2.mean, a2);
    }
  }
  const MeanSe zm = mean_se(s.zero_mass);
  const double za = nu.nu2_zero_mass();
  const bool zok = std::abs(zm.mean - za) <= 3.0 * zm.se;
  if (!zok) {
    o.pass = false;
    o.detail += " " + label + format(" nu2({0}) %.6g vs %.6g;", zm.mean, za);
  }
  o.detail = label + format(": max |z| %.2f, nu2({0}) dev %.2g SE", worst, std::abs(zm.mean - za) / zm.se) +
             (o.pass ? "" : " |" + o.detail);
  return o;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  bool all = true;
  using clock = std::chrono::steady_clock;
  auto seconds_since = [](clock::time_point s) {
    return std::chrono::duration<double>(clock::now() - s).count();
  };

  // Shared analytic objects.
  const SpectrumModel mp = SpectrumModel::marchenko_pastur(kDelta);
  const SpectrumModel beta = SpectrumModel::shifted_beta(1.5, 1.5, 1.0, 3.0, kDelta);
  const InducedMeasures nu_mp = build_induced_measures(ShrinkageSet(mp, kTheta));
  const InducedMeasures nu_beta = build_induced_measures(ShrinkageSet(beta, kTheta));
  const OptimalSeResult se_mp = optimal_se_run(nu_mp, kPrior, kPrior, 60);
  const OptimalSeResult se_beta = optimal_se_run(nu_beta, kPrior, kPrior, kT);

  // Gaussian-noise simulations shared by criteria 1, 2, 4, 6 and 7.
  auto start = clock::now();
  GaussianRuns g;
  RunOptions keep;
  keep.store_iterates = true;
  for (int s = 0; s < kSeeds; ++s) {
    const ProblemInstance inst = make_instance(kPrior, kPrior, GaussianNoise{}, kM, kN, kTheta, s, false);
    const SvdCache svd = thin_svd(inst.Y);
    g.oamp.push_back(optimal_oamp_run(inst, svd, nu_mp, se_mp.states, kT, keep));
    g.amp.push_back(gaussian_amp_run(inst, kT));
    g.moments.add(empirical_signal_measures(inst, svd));
    std::vector<double> tr;
    for (int t = 1; t <= kT; ++t) {
      const DenoiserSet den(nu_mp, se_mp.states[t].rho1, se_mp.states[t].rho2);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < svd.sigma.size(); ++i)
        sum += den.F(nu_mp.empirical_terms(svd.sigma[i] * svd.sigma[i]));
      tr.push_back(std::abs(sum) / kM);
    }
    g.traces.push_back(tr);
    g.u_star.push_back(inst.u_star);
  }
  const double gaussian_seconds = seconds_since(start);

  // 1. OAMP against its state evolution on Gaussian noise.
  {
    std::vector<std::vector<double>> cu, cv;
    for (const IterationTrace& tr : g.oamp) {
      std::vector<double> a, b;
      for (const IterationRecord& r : tr.records) {
        a.push_back(r.cos2_u);
        b.push_back(r.cos2_v);
      }
      cu.push_back(a);
      cv.push_back(b);
    }
    std::vector<double> pu, pv;
    for (int t = 1; t <= kT; ++t) {
      pu.push_back(1.0 - se_mp.states[t].mmse_u);
      pv.push_back(1.0 - se_mp.states[t].mmse_v);
    }
    const double du = max_abs_dev(cu, pu), dv = max_abs_dev(cv, pv);
    Outcome o;
    o.pass = du <= 0.02 && dv <= 0.02;
    o.detail = format("max |mean cos2 - SE| u %.4f, v %.4f", du, dv) + " (tol 0.02, t = 1..10)";
    report(1, "SE agreement", o, gaussian_seconds, all);
  }

  // 2. Optimal SE limit, Gaussian fixed point and Gaussian AMP.
  {
    start = clock::now();
    const FixedPointResult fp = gaussian_fixed_point(kTheta, kDelta, kPrior, kPrior);
    const SeState& lim = se_mp.last();
    const double d = std::max({std::abs(lim.w1 - fp.w1), std::abs(lim.w2 - fp.w2), std::abs(lim.mmse_u - fp.mmse_u),
                               std::abs(lim.mmse_v - fp.mmse_v)});
    std::vector<double> au, av;
    for (const BaselineResult& b : g.amp) {
      au.push_back(b.cos2_u.back());
      av.push_back(b.cos2_v.back());
    }
    const double amp_u = mean_se(au).mean, amp_v = mean_se(av).mean;
    const double d_fp = std::max(std::abs(amp_u - (1.0 - fp.mmse_u)), std::abs(amp_v - (1.0 - fp.mmse_v)));
    const double d_se = std::max(std::abs(amp_u - (1.0 - lim.mmse_u)), std::abs(amp_v - (1.0 - lim.mmse_v)));
    Outcome o;
    o.pass = d <= 1e-6 && d_fp <= 0.02 && d_se <= 0.02;
    o.detail = format("|SE limit - fixed point| %.2g (tol 1e-6);", d) +
               format(" AMP vs fixed point %.4f, vs SE limit %.4f (tol 0.02)", d_fp, d_se);
    report(2, "Fixed-point equivalence", o, seconds_since(start), all);
  }

  // 3. Beta spectrum: OAMP against PCA and against its own SE.
  MomentSamples beta_moments;
  {
    start = clock::now();
    const NoiseModel noise = RotationInvariantNoise{beta, SingularValueMode::Iid};
    std::vector<std::vector<double>> cu, cv;
    std::vector<double> pca_u, pca_v;
    for (int s = 0; s < kSeeds; ++s) {
      const ProblemInstance inst = make_instance(kPrior, kPrior, noise, kM, kN, kTheta, s, false);
      const SvdCache svd = thin_svd(inst.Y);
      const IterationTrace tr = optimal_oamp_run(inst, svd, nu_beta, se_beta.states, kT);
      std::vector<double> a, b;
      for (const IterationRecord& r : tr.records) {
        a.push_back(r.cos2_u);
        b.push_back(r.cos2_v);
      }
      cu.push_back(a);
      cv.push_back(b);
      const BaselineResult p = pca_estimate(svd, inst);
      pca_u.push_back(p.cos2_u[0]);
      pca_v.push_back(p.cos2_v[0]);
      beta_moments.add(empirical_signal_measures(inst, svd));
    }
    std::vector<double> pu, pv;
    for (int t = 1; t <= kT; ++t) {
      pu.push_back(1.0 - se_beta.states[t].mmse_u);
      pv.push_back(1.0 - se_beta.states[t].mmse_v);
    }
    const double du = max_abs_dev(cu, pu), dv = max_abs_dev(cv, pv);
    std::vector<double> last_u, last_v;
    for (int s = 0; s < kSeeds; ++s) {
      last_u.push_back(cu[s].back());
      last_v.push_back(cv[s].back());
    }
    const double gap_u = mean_se(last_u).mean - mean_se(pca_u).mean;
    const double gap_v = mean_se(last_v).mean - mean_se(pca_v).mean;
    Outcome o;
    o.pass = gap_u >= 0.05 && gap_v >= 0.05 && du <= 0.02 && dv <= 0.02;
    o.detail = format("OAMP - PCA final cos2 u %.4f, v %.4f (min 0.05);", gap_u, gap_v) +
               format(" max |mean cos2 - SE| u %.4f, v %.4f (tol 0.02)", du, dv);
    report(3, "Beta spectrum vs PCA", o, seconds_since(start), all);
  }

  // 4. Induced spectral measures: empirical moments against the analytic limits.
  {
    start = clock::now();
    Outcome o;
    std::vector<Outcome> parts;
    parts.push_back(compare_moments(nu_mp, g.moments, "MP theta=2"));
    parts.push_back(compare_moments(nu_beta, beta_moments, "Beta theta=2"));
    for (const SpectrumModel* spec : {&mp, &beta}) {
      const InducedMeasures nu1 = build_induced_measures(ShrinkageSet(*spec, 1.0));
      const NoiseModel noise = spec == &mp ? NoiseModel{GaussianNoise{}}
                                           : NoiseModel{RotationInvariantNoise{beta, SingularValueMode::Iid}};
      MomentSamples ms;
      for (int s = 0; s < kSeeds; ++s) {
        const ProblemInstance inst = make_instance(kPrior, kPrior, noise, kM, kN, 1.0, 500 + s, false);
        ms.add(empirical_signal_measures(inst, thin_svd(inst.Y)));
      }
      parts.push_back(compare_moments(nu1, ms, spec == &mp ? "MP theta=1" : "Beta theta=1"));
    }
    for (const Outcome& p : parts) {
      o.pass = o.pass && p.pass;
      o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
    }
    o.detail += " (3 SE, 20 seeds)";
    report(4, "Induced-measure moments", o, seconds_since(start), all);
  }

  // 5. Outlier location and PCA overlap at M = 2000.
  {
    start = clock::now();
    const SpectralAtom& atom = nu_mp.atoms().front();
    std::vector<double> top, pca;
    for (int s = 0; s < kSeeds; ++s) {
      const ProblemInstance inst =
          make_instance(kPrior, kPrior, GaussianNoise{}, 2 * kM, 2 * kN, kTheta, 900 + s, false);
      const SvdCache svd = thin_svd(inst.Y);
      top.push_back(svd.sigma[0] * svd.sigma[0]);
      pca.push_back(pca_estimate(svd, inst).cos2_u[0]);
    }
    double worst_rel = 0.0;
    for (double l : top) worst_rel = std::max(worst_rel, std::abs(l - atom.location) / atom.location);
    const double mean_rel = std::abs(mean_se(top).mean - atom.location) / atom.location;
    const double dp = std::abs(mean_se(pca).mean - atom.nu1_mass);
    Outcome o;
    o.pass = mean_rel <= 0.01 && dp <= 0.02;
    o.detail = format("lambda* %.4f, relative error of the mean top eigenvalue %.4f (tol 0.01", atom.location,
                      mean_rel) +
               format("; worst seed %.4f);", worst_rel) +
               format(" PCA cos2 vs nu1 atom mass %.4f: dev %.4f (tol 0.02)", atom.nu1_mass, dp);
    report(5, "Outlier and PCA", o, seconds_since(start), all);
  }

  // 6. Structural properties.
  {
    start = clock::now();
    double trace_free = 0.0;
    for (const auto* pair : {&nu_mp, &nu_beta}) {
      const OptimalSeResult& se = pair == &nu_mp ? se_mp : se_beta;
      for (int t = 1; t <= kT; ++t) {
        const DenoiserSet den(*pair, se.states[t].rho1, se.states[t].rho2);
        trace_free = std::max(
            {trace_free, std::abs(pair->integrate_terms(Measure::Mu, [&](const ShrinkageTerms& x) { return den.F(x); })),
             std::abs(pair->integrate_terms(Measure::MuTilde, [&](const ShrinkageTerms& x) { return den.G(x); }))});
      }
    }
    double trace_emp = 0.0;
    for (const auto& tr : g.traces)
      for (double v : tr) trace_emp = std::max(trace_emp, v);

    double div = 0.0;
    ChannelOptions fine;
    fine.hermite_nodes = 404;
    for (const PriorModel& p : {PriorModel{PriorKind::Rademacher, 0.0}, kPrior,
                                PriorModel{PriorKind::UnitGaussian, 0.0}, PriorModel{PriorKind::UnitGaussian, 0.04}}) {
      for (int k = 1; k <= 9; ++k) {
        const double w = 0.1 * k;
        const ScalarChannel ch(p, w, fine);
        // E[phi_bar'(X)] = E[Z phi_bar(X)] / sqrt(1 - w) by Stein's identity.
        const double e = ch.expect([&](double xs, double x, double c) {
          return (x - std::sqrt(w) * xs) / std::sqrt(1.0 - w) * ch.dmmse(x, c);
        });
        div = std::max(div, std::abs(e / std::sqrt(1.0 - w)));
      }
    }

    double plemelj = 0.0;
    const double eps = 1e-6;
    for (const SpectrumModel* spec : {&mp, &beta}) {
      const double lo = spec->support_min(), hi = spec->support_max();
      for (int i = 1; i < 20; ++i) {
        const double l = lo + (hi - lo) * i / 20.0;
        const std::complex<double> s = spec->stieltjes(std::complex<double>(l, -eps));
        const std::complex<double> ref(std::numbers::pi * spec->hilbert(l), std::numbers::pi * spec->density(l));
        plemelj = std::max(plemelj, std::abs(s - ref) / std::abs(ref));
      }
    }
    Outcome o;
    o.pass = trace_free <= 1e-10 && trace_emp <= 0.01 && div <= 1e-6 && plemelj <= 1e-3;
    o.detail = format("<F*>, <G*> %.2g (tol 1e-10); |tr F*(YY^T)|/M %.4f (tol 0.01);", trace_free, trace_emp) +
               format(" |E[phi_bar']| %.2g (tol 1e-6); Plemelj %.2g (tol 1e-3)", div, plemelj);
    report(6, "Structural properties", o, seconds_since(start), all);
  }

  // 7. Residual Gaussianity of the scaled iterates.
  {
    start = clock::now();
    Outcome o;
    for (int t : {1, 3}) {
      const double w = se_mp.states[t].w1;
      const double mu = std::sqrt(w), sd = std::sqrt(1.0 - w);
      std::vector<double> pooled;
      for (int s = 0; s < kSeeds; ++s) {
        const Eigen::VectorXd& u = g.oamp[s].u_iterates[t - 1];
        for (Eigen::Index i = 0; i < u.size(); ++i) pooled.push_back((u[i] - mu * g.u_star[s][i]) / sd);
      }
      const KsResult ks = ks_test_normal(pooled);
      o.pass = o.pass && ks.p_value > 0.01;
      o.detail += "t=" + std::to_string(t) + format(": KS p = %.3f; ", ks.p_value);
    }
    o.detail += "(level 0.01, 20 seeds pooled)";
    report(7, "Residual Gaussianity", o, seconds_since(start), all);
  }

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
