#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/analysis.hpp"
#include "dfrc/receivers.hpp"
#include "dfrc/scene.hpp"

namespace dfrc {

enum class Scheme { kSic = 0, kProjection = 1, kJointMl = 2, kGenie = 3 };

std::string scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

/// Swept variable and its resolved grid. variable is one of
/// "none", "L", "P_r_dB", "M_r".
struct SweepSpec {
  std::string variable = "none";
  std::vector<double> values = {0.0};
};

/// Parses "VAR=START:STOP:STEP" (inclusive, stop matched within 1e-9 of a
/// step) or the list form "VAR=v1,v2,...". Throws std::invalid_argument on
/// malformed text or unknown variables.
SweepSpec parse_sweep(const std::string& text);

/// Full experiment description. Loadable from a flat JSON object whose keys
/// use dotted paths (e.g. "system.M_r"); command-line flags override them.
struct ExperimentConfig {
  SystemConfig system;
  ScenePrior scene;
  SweepSpec sweep;
  int trials = 500;
  std::uint64_t master_seed = 1;
  std::vector<Scheme> schemes = {Scheme::kSic, Scheme::kProjection};
  DetectorStrategy detector = DetectorStrategy::kSdr;
  std::string sic_stage1 = "ml";  // or "mmse", the classical linear stage
  SdrParams sdr;
  std::string out = "results.csv";
  std::string format = "csv";
  std::string nmse_aggregation = "mean_of_ratios";
  int sinr_probe_trials = 400;  // draws behind the per-point SINR estimate

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

/// Parses "sic,projection,..." into schemes. Throws on unknown names.
std::vector<Scheme> parse_schemes(const std::string& csv);

/// Applies one sweep value to a system config ("L" and "M_r" must be
/// integral; "P_r_dB" converts to watts).
SystemConfig apply_sweep_value(const SystemConfig& base,
                               const std::string& variable, double value);

/// One aggregated output row; field set and order match the emitted files.
struct MetricsRecord {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string scheme;
  std::string metric;
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
};

/// Monte-Carlo sweep over the configured grid. Trials are independently
/// seeded from (master_seed, sweep_index, trial_index) and merged in trial
/// order, so results are identical for any thread count.
std::vector<MetricsRecord> run_sweep(const ExperimentConfig& cfg);

std::string render_csv(const std::vector<MetricsRecord>& records);
std::string render_json(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> parse_json_records(const std::string& text);

/// Writes records to path in "csv" or "json" format.
void emit_results(const std::vector<MetricsRecord>& records,
                  const std::string& path, const std::string& format);

/// Worker threads for trial execution: DFRCSIM_THREADS when set, otherwise
/// the hardware concurrency.
int thread_count();

struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  double residual = 0.0;
  bool pass = false;
};

/// Re-derives the scheme's analytical claims numerically on seeded
/// instances. All checks must pass on a healthy build.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed);

bool all_pass(const std::vector<CheckResult>& checks);

/// Worst mismatch between the brute-force joint minimizer and the
/// projected receiver on one model: symbol disagreement reports 1e9,
/// otherwise the target-estimate distance. Exposed for fault injection.
double joint_ml_reduction_residual(const StackedModel& model,
                                   const Constellation& constel);

/// KKT residual of a water-filling allocation (0 for the exact optimum).
double waterfill_kkt_residual(const RVec& eigenvalues, double snr,
                              double total_power, const RVec& alloc);

}  // namespace dfrc
