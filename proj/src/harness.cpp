#include "roamp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "roamp/baselines.hpp"
#include "roamp/errors.hpp"
#include "roamp/oamp.hpp"
#include "roamp/state_evolution.hpp"

#ifndef ROAMP_VERSION
#define ROAMP_VERSION "unknown"
#endif

namespace roamp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

SpectrumModel read_tabulated(const std::string& path, double delta) {
  std::ifstream is(path);
  if (!is) throw ConfigError("tabulated spectrum: cannot open " + path);
  std::vector<double> grid, dens;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x = 0.0, y = 0.0;
    if (!(ls >> x >> y)) throw ConfigError("tabulated spectrum: malformed line '" + line + "'");
    grid.push_back(x);
    dens.push_back(y);
  }
  return SpectrumModel::tabulated(std::move(grid), std::move(dens), delta);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct SeedOutcome {
  bool ok = false;
  std::string error;
  // method -> per-iteration (cos2_u, cos2_v, mse_u, mse_v)
  std::vector<std::vector<std::array<double, 4>>> rows;
};

bool wants(const ExperimentConfig& cfg, const std::string& m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

}  // namespace

std::vector<std::uint64_t> seed_range(std::uint64_t base, int count) {
  if (count < 1) throw ConfigError("config: seed count must be positive");
  std::vector<std::uint64_t> out(count);
  for (int i = 0; i < count; ++i) out[i] = base + static_cast<std::uint64_t>(i);
  return out;
}

std::vector<std::string> parse_methods(const std::string& list) {
  std::vector<std::string> out;
  for (const std::string& m : split(list, ',')) {
    if (m.empty()) continue;
    const std::string name = m == "se-only" ? "se" : m;
    if (name != "oamp" && name != "pca" && name != "amp" && name != "se")
      throw ConfigError("config: unknown method '" + m + "'");
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "noise") {
    cfg.noise = value;
  } else if (key == "singular_values") {
    if (value == "iid") cfg.singular_values = SingularValueMode::Iid;
    else if (value == "quantile") cfg.singular_values = SingularValueMode::Quantile;
    else throw ConfigError("config: singular_values must be iid or quantile");
  } else if (key == "theta") {
    cfg.theta = to_double(key, value);
  } else if (key == "M") {
    cfg.M = static_cast<int>(to_int(key, value));
  } else if (key == "N") {
    cfg.N = static_cast<int>(to_int(key, value));
  } else if (key == "prior") {
    cfg.prior_u.kind = cfg.prior_v.kind = parse_prior_kind(value);
  } else if (key == "prior_u") {
    cfg.prior_u.kind = parse_prior_kind(value);
  } else if (key == "prior_v") {
    cfg.prior_v.kind = parse_prior_kind(value);
  } else if (key == "w0") {
    cfg.prior_u.side_info_strength = cfg.prior_v.side_info_strength = to_double(key, value);
  } else if (key == "w0_u") {
    cfg.prior_u.side_info_strength = to_double(key, value);
  } else if (key == "w0_v") {
    cfg.prior_v.side_info_strength = to_double(key, value);
  } else if (key == "iterations") {
    cfg.iterations = static_cast<int>(to_int(key, value));
  } else if (key == "seed_base") {
    cfg.seed_base = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "seeds") {
    if (value.find(',') != std::string::npos) {
      cfg.seeds.clear();
      for (const std::string& s : split(value, ','))
        if (!s.empty()) cfg.seeds.push_back(static_cast<std::uint64_t>(to_int(key, s)));
    } else {
      cfg.seeds.clear();
      cfg.seed_count = static_cast<int>(to_int(key, value));
    }
  } else if (key == "methods") {
    cfg.methods = parse_methods(value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(to_int(key, value));
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  return parse_config(is);
}

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
  if (!seeds.empty()) return seeds;
  if (seed_count < 1) return {};
  return seed_range(seed_base, seed_count);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.M < 1 || cfg.N < 1) throw ConfigError("config: M and N must be positive");
  if (cfg.M > cfg.N) throw ConfigError("config: M must not exceed N");
  if (cfg.iterations < 1) throw ConfigError("config: iterations must be >= 1");
  if (cfg.resolved_seeds().empty()) throw ConfigError("config: no seeds");
  if (!(cfg.theta >= 0.0)) throw ConfigError("config: theta must be >= 0");
  for (const PriorModel* p : {&cfg.prior_u, &cfg.prior_v})
    if (!(p->side_info_strength >= 0.0 && p->side_info_strength < 1.0))
      throw ConfigError("config: w0 must lie in [0, 1)");
}

SpectrumModel analytic_spectrum(const std::string& noise, double delta) {
  if (noise == "gaussian" || noise == "mp") return SpectrumModel::marchenko_pastur(delta);
  if (noise.rfind("beta:", 0) == 0) {
    const auto p = split(noise.substr(5), ',');
    if (p.size() != 4) throw ConfigError("noise: beta expects beta:a,b,lo,hi");
    return SpectrumModel::shifted_beta(to_double("noise", p[0]), to_double("noise", p[1]),
                                       to_double("noise", p[2]), to_double("noise", p[3]), delta);
  }
  if (noise.rfind("tabulated:", 0) == 0) return read_tabulated(noise.substr(10), delta);
  throw ConfigError("noise: unknown model '" + noise + "'");
}

NoiseModel make_noise(const std::string& noise, double delta, SingularValueMode mode) {
  if (noise == "gaussian") return GaussianNoise{};
  return RotationInvariantNoise{analytic_spectrum(noise, delta), mode};
}

int default_workers() {
  if (const char* env = std::getenv("ROAMP_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

AggregateReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const double delta = cfg.delta();
  const int T = cfg.iterations;
  const SpectrumModel spectrum = analytic_spectrum(cfg.noise, delta);
  const NoiseModel noise = make_noise(cfg.noise, delta, cfg.singular_values);
  const ShrinkageSet shrink(spectrum, cfg.theta);
  const InducedMeasures measures = build_induced_measures(shrink);
  const OptimalSeResult se = optimal_se_run(measures, cfg.prior_u, cfg.prior_v, T);

  AggregateReport report;
  report.config = cfg;
  report.timestamp = now_iso8601();
  report.se_plateau_iteration = se.plateau_iteration;

  double pca_u = 0.0, pca_v = 0.0;
  for (const SpectralAtom& a : measures.atoms()) {
    if (a.unverified_branch) continue;
    pca_u = a.nu1_mass;
    pca_v = a.nu2_mass;
  }
  const bool is_gaussian = std::holds_alternative<GaussianNoise>(noise);
  if (wants(cfg, "amp") && !is_gaussian)
    spdlog::warn("run_experiment: Gaussian AMP on non-Gaussian noise; its SE prediction does not apply");
  const auto amp_se = gaussian_amp_se(cfg.theta, delta, cfg.prior_u, cfg.prior_v, T);

  std::vector<std::string> sim_methods;
  for (const char* m : {"oamp", "pca", "amp"})
    if (wants(cfg, m)) sim_methods.push_back(m);

  const std::vector<std::uint64_t> seeds = cfg.resolved_seeds();
  const std::size_t n_seeds = seeds.size();
  std::vector<SeedOutcome> outcomes(n_seeds);
  if (!sim_methods.empty()) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < n_seeds; k = next++) {
        SeedOutcome& oc = outcomes[k];
        try {
          const ProblemInstance inst =
              make_instance(cfg.prior_u, cfg.prior_v, noise, cfg.M, cfg.N, cfg.theta, seeds[k], false);
          std::optional<SvdCache> svd;
          if (wants(cfg, "oamp") || wants(cfg, "pca")) svd = thin_svd(inst.Y);
          for (const std::string& m : sim_methods) {
            std::vector<std::array<double, 4>> rows;
            if (m == "oamp") {
              const IterationTrace tr = optimal_oamp_run(inst, *svd, measures, se.states, T);
              for (const auto& r : tr.records) rows.push_back({r.cos2_u, r.cos2_v, r.mse_u, r.mse_v});
            } else if (m == "pca") {
              const BaselineResult b = pca_estimate(*svd, inst);
              rows.assign(T, {b.cos2_u[0], b.cos2_v[0], b.mse_u[0], b.mse_v[0]});
            } else {
              const BaselineResult b = gaussian_amp_run(inst, T);
              for (int t = 0; t < T; ++t) rows.push_back({b.cos2_u[t], b.cos2_v[t], b.mse_u[t], b.mse_v[t]});
            }
            oc.rows.push_back(std::move(rows));
          }
          oc.ok = true;
        } catch (const std::exception& e) {
          oc.error = e.what();
          oc.rows.clear();
        }
      }
    };
    const int nw = std::max(1, std::min<int>(cfg.workers > 0 ? cfg.workers : default_workers(),
                                             static_cast<int>(n_seeds)));
    std::vector<std::thread> pool;
    for (int i = 1; i < nw; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  std::vector<std::size_t> good;
  for (std::size_t k = 0; k < n_seeds; ++k) {
    if (sim_methods.empty() || outcomes[k].ok) {
      good.push_back(k);
    } else {
      ++report.failures;
      spdlog::warn("seed {} failed: {}", seeds[k], outcomes[k].error);
    }
  }
  report.seeds_run = sim_methods.empty() ? 0 : static_cast<int>(n_seeds);
  if (!sim_methods.empty() && report.failures > 0.2 * static_cast<double>(n_seeds)) {
    throw ConvergenceError("run_experiment: " + std::to_string(report.failures) + " of " +
                           std::to_string(n_seeds) + " seeds failed");
  }

  for (std::size_t mi = 0; mi < sim_methods.size(); ++mi) {
    MethodCurve c;
    c.method = sim_methods[mi];
    for (int t = 0; t < T; ++t) {
      std::array<std::vector<double>, 4> cols;
      for (std::size_t k : good)
        for (int j = 0; j < 4; ++j) cols[j].push_back(outcomes[k].rows[mi][t][j]);
      c.cos2_u.push_back(mean_se(cols[0]));
      c.cos2_v.push_back(mean_se(cols[1]));
      c.mse_u.push_back(mean_se(cols[2]));
      c.mse_v.push_back(mean_se(cols[3]));
      if (c.method == "oamp") {
        c.pred_cos2_u.push_back(1.0 - se.states[t + 1].mmse_u);
        c.pred_cos2_v.push_back(1.0 - se.states[t + 1].mmse_v);
      } else if (c.method == "pca") {
        c.pred_cos2_u.push_back(pca_u);
        c.pred_cos2_v.push_back(pca_v);
      } else {
        c.pred_cos2_u.push_back(is_gaussian ? amp_se[t].cos2_u : std::nan(""));
        c.pred_cos2_v.push_back(is_gaussian ? amp_se[t].cos2_v : std::nan(""));
      }
    }
    report.curves.push_back(std::move(c));
  }
  if (wants(cfg, "se")) {
    MethodCurve c;
    c.method = "se";
    c.simulated = false;
    for (int t = 1; t <= T; ++t) {
      c.pred_cos2_u.push_back(1.0 - se.states[t].mmse_u);
      c.pred_cos2_v.push_back(1.0 - se.states[t].mmse_v);
    }
    report.curves.push_back(std::move(c));
  }
  return report;
}

void emit_csv(const AggregateReport& report, std::ostream& os) {
  os << "method,t,mean_cos2_u,se_cos2_u,mean_cos2_v,se_cos2_v,pred_cos2_u,pred_cos2_v,mean_mse_u,mean_mse_v\n";
  for (const MethodCurve& c : report.curves) {
    for (std::size_t t = 0; t < c.pred_cos2_u.size(); ++t) {
      os << c.method << ',' << (t + 1) << ',';
      if (c.simulated) {
        os << fmt(c.cos2_u[t].mean) << ',' << fmt(c.cos2_u[t].se) << ',' << fmt(c.cos2_v[t].mean) << ','
           << fmt(c.cos2_v[t].se) << ',';
      } else {
        os << ",,,,";
      }
      os << fmt(c.pred_cos2_u[t]) << ',' << fmt(c.pred_cos2_v[t]) << ',';
      if (c.simulated) os << fmt(c.mse_u[t].mean) << ',' << fmt(c.mse_v[t].mean);
      else os << ',';
      os << '\n';
    }
  }
}

void emit_csv(const AggregateReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("emit_csv: cannot open " + path);
  emit_csv(report, os);
  if (!os) throw ConfigError("emit_csv: write failed for " + path);
}

void emit_metadata(const AggregateReport& report, const std::string& path) {
  const ExperimentConfig& c = report.config;
  nlohmann::json j;
  j["version"] = ROAMP_VERSION;
  j["timestamp"] = report.timestamp;
  j["config"] = {{"noise", c.noise},
                 {"singular_values", c.singular_values == SingularValueMode::Iid ? "iid" : "quantile"},
                 {"theta", c.theta},
                 {"M", c.M},
                 {"N", c.N},
                 {"prior_u", to_string(c.prior_u.kind)},
                 {"prior_v", to_string(c.prior_v.kind)},
                 {"w0_u", c.prior_u.side_info_strength},
                 {"w0_v", c.prior_v.side_info_strength},
                 {"iterations", c.iterations},
                 {"seeds", c.resolved_seeds()},
                 {"methods", c.methods}};
  j["seeds_run"] = report.seeds_run;
  j["failures"] = report.failures;
  j["se_plateau_iteration"] = report.se_plateau_iteration;
  std::ofstream os(path);
  if (!os) throw ConfigError("emit_metadata: cannot open " + path);
  os << j.dump(2) << '\n';
}

int spectra_check(std::ostream& os) {
  int failures = 0;
  auto report = [&](const std::string& name, double value, double target, double tol) {
    const bool pass = std::abs(value - target) <= tol;
    if (!pass) ++failures;
    os << (pass ? "PASS " : "FAIL ") << name << ": " << std::setprecision(10) << value << " (target "
       << target << ", tol " << tol << ")\n";
  };
  const double delta = 0.5;
  const std::vector<std::pair<std::string, SpectrumModel>> spectra = {
      {"mp(0.5)", SpectrumModel::marchenko_pastur(delta)},
      {"beta(1.5,1.5,[1,3])", SpectrumModel::shifted_beta(1.5, 1.5, 1.0, 3.0, delta)}};
  for (const auto& [name, mu] : spectra) {
    for (double theta : {1.0, 2.0}) {
      const InducedMeasures nu = build_induced_measures(ShrinkageSet(mu, theta));
      const std::string tag = name + " theta=" + std::to_string(theta).substr(0, 3);
      auto one = [](const ShrinkageTerms&) { return 1.0; };
      report(tag + " nu1 mass", nu.integrate_terms(Measure::Nu1, one), 1.0, 1e-4);
      report(tag + " nu2 mass", nu.integrate_terms(Measure::Nu2, one), 1.0, 1e-4);
      report(tag + " nu3 mass", nu.inner_product(Measure::Nu3, [](double) { return 1.0; }), 0.0, 1e-4);
      double worst = 0.0;
      for (complex z : {complex(0.5, 0.5), complex(2.0, 1.0), complex(4.0, -0.7), complex(7.0, 0.2),
                        complex(-1.0, 0.3)}) {
        const complex lhs =
            nu.integrate_terms(Measure::Nu1, [&](const ShrinkageTerms& t) { return (1.0 / (z - t.lambda)).real(); }) +
            complex(0.0, 1.0) *
                nu.integrate_terms(Measure::Nu1, [&](const ShrinkageTerms& t) { return (1.0 / (z - t.lambda)).imag(); });
        const complex rhs = mu.stieltjes(z) / (1.0 - theta * theta * mu.c_transform(z));
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      report(tag + " nu1 Stieltjes transform", worst, 0.0, 1e-4);
    }
  }
  return failures;
}

}  // namespace roamp
