#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "roamp/model.hpp"
#include "roamp/stats.hpp"

namespace roamp {

struct ExperimentConfig {
  // gaussian | mp | beta:a,b,lo,hi | tabulated:path
  std::string noise = "gaussian";
  SingularValueMode singular_values = SingularValueMode::Iid;
  double theta = 2.0;
  int M = 1000;
  int N = 2000;
  PriorModel prior_u;
  PriorModel prior_v;
  int iterations = 10;
  // Either an explicit list or seed_count seeds starting at seed_base.
  std::vector<std::uint64_t> seeds;
  std::uint64_t seed_base = 0;
  int seed_count = 0;
  // Subset of {oamp, pca, amp, se}.
  std::vector<std::string> methods{"oamp", "pca", "amp"};
  std::string out;
  // 0 selects ROAMP_WORKERS or 1.
  int workers = 0;

  double delta() const { return static_cast<double>(M) / N; }
  std::vector<std::uint64_t> resolved_seeds() const;
};

/// Applies one `key = value` setting; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
/// Seeds seed_base, ..., seed_base + count - 1.
std::vector<std::uint64_t> seed_range(std::uint64_t base, int count);
std::vector<std::string> parse_methods(const std::string& list);
void validate(const ExperimentConfig& cfg);

/// Limiting spectrum of W W^T for the configured noise (MP for Gaussian noise).
SpectrumModel analytic_spectrum(const std::string& noise, double delta);
NoiseModel make_noise(const std::string& noise, double delta, SingularValueMode mode);

struct MethodCurve {
  std::string method;
  std::vector<MeanSe> cos2_u;
  std::vector<MeanSe> cos2_v;
  std::vector<MeanSe> mse_u;
  std::vector<MeanSe> mse_v;
  std::vector<double> pred_cos2_u;
  std::vector<double> pred_cos2_v;
  // False for prediction-only rows.
  bool simulated = true;
};

struct AggregateReport {
  ExperimentConfig config;
  std::vector<MethodCurve> curves;
  int seeds_run = 0;
  int failures = 0;
  int se_plateau_iteration = -1;
  std::string timestamp;
};

AggregateReport run_experiment(const ExperimentConfig& cfg);

void emit_csv(const AggregateReport& report, const std::string& path);
void emit_csv(const AggregateReport& report, std::ostream& os);
/// Config echo, code version, timestamp and failure counts as JSON.
void emit_metadata(const AggregateReport& report, const std::string& path);

/// Analytic checks of the induced measures for the reference spectra; one
/// line per check. Returns the number of failures.
int spectra_check(std::ostream& os);

int default_workers();

}  // namespace roamp
