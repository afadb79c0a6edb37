#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "dfrc/analysis.hpp"
#include "dfrc/harness.hpp"

namespace {

double to_db(double v) { return 10.0 * std::log10(v); }

int do_simulate(dfrc::ExperimentConfig cfg) {
  cfg.validate();
  const std::vector<dfrc::MetricsRecord> records = dfrc::run_sweep(cfg);
  dfrc::emit_results(records, cfg.out, cfg.format);
  std::printf("wrote %zu rows (%d trials x %zu sweep points) to %s\n",
              records.size(), cfg.trials, cfg.sweep.values.size(),
              cfg.out.c_str());
  return 0;
}

int do_verify(std::uint64_t seed) {
  const std::vector<dfrc::CheckResult> checks =
      dfrc::run_verification_suite(seed);
  for (const dfrc::CheckResult& c : checks) {
    std::printf("%-34s %s  residual %.3e  tolerance %.3e\n", c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.residual, c.tolerance);
  }
  const bool ok = dfrc::all_pass(checks);
  std::printf("%s\n", ok ? "all checks passed" : "verification FAILED");
  return ok ? 0 : 1;
}

int do_analyze(const dfrc::ExperimentConfig& cfg, int draws) {
  const dfrc::SystemConfig& sys = cfg.system;
  const double snr_p = dfrc::snr_projected_theory(sys);
  const double sinr = dfrc::sinr_sic_closed_form(sys, cfg.scene);
  const dfrc::CMat X_r =
      dfrc::gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  const dfrc::CMat R = X_r * X_r.adjoint() / double(sys.L);
  const double bound =
      dfrc::crb_target_response(R, sys.sigma2, sys.M_r, sys.L);

  std::printf("post-reduction communication SNR : %.6g (%.3f dB)\n", snr_p,
              to_db(snr_p));
  std::printf("pre-cancellation SINR            : %.6g (%.3f dB)\n", sinr,
              to_db(sinr));
  std::printf("target estimation bound (tse)    : %.6g\n", bound);

  double comm = 0.0, proj = 0.0, sic = 0.0;
  for (int i = 0; i < draws; ++i) {
    dfrc::Rng rng(
        dfrc::derive_seed(cfg.master_seed, 3, static_cast<std::uint64_t>(i)));
    const dfrc::CMat H_c = dfrc::gen_comm_channel(rng, sys.M_r, sys.N_t);
    const dfrc::RateReport rep = dfrc::ergodic_rates(H_c, sys, sinr);
    comm += rep.rate_comm_only;
    proj += rep.rate_projection;
    sic += rep.rate_sic;
  }
  std::printf("ergodic rate, radar-free channel : %.6g bit/s/Hz (%d draws)\n",
              comm / draws, draws);
  std::printf("ergodic rate, projection scheme  : %.6g bit/s/Hz\n",
              proj / draws);
  std::printf("ergodic rate, cancellation scheme: %.6g bit/s/Hz\n",
              sic / draws);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink joint radar-communication receiver simulations"};
  app.require_subcommand(1);

  std::string config_path, sweep_text, out_path, format, schemes_csv,
      detector_name;
  int trials = 0;
  std::uint64_t seed = 0;

  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a Monte-Carlo sweep and write aggregated metrics");
  sim->add_option("--config", config_path, "JSON experiment description")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* opt_sweep = sim->add_option(
      "--sweep", sweep_text,
      "Override sweep: VAR=START:STOP:STEP or VAR=v1,v2,... "
      "(VAR: L, P_r_dB, M_r)");
  CLI::Option* opt_trials =
      sim->add_option("--trials", trials, "Override trials per sweep point")
          ->check(CLI::PositiveNumber);
  CLI::Option* opt_seed =
      sim->add_option("--seed", seed, "Override the master seed");
  CLI::Option* opt_out =
      sim->add_option("--out", out_path, "Override the output path");
  CLI::Option* opt_format =
      sim->add_option("--format", format, "Override the output format")
          ->check(CLI::IsMember({"csv", "json"}));
  CLI::Option* opt_schemes = sim->add_option(
      "--schemes", schemes_csv,
      "Override receivers: comma list of sic,projection,joint_ml,genie");
  CLI::Option* opt_detector =
      sim->add_option("--detector", detector_name,
                      "Override the projected-problem symbol detector")
          ->check(CLI::IsMember({"exhaustive", "sdr"}));

  std::uint64_t verify_seed = 12345;
  CLI::App* ver = app.add_subcommand(
      "verify", "Re-derive the analytical claims numerically; exit 1 on any "
                "failed check");
  ver->add_option("--seed", verify_seed, "Seed for the check instances");

  std::string analyze_config;
  int draws = 200;
  CLI::App* ana = app.add_subcommand(
      "analyze", "Print operating-point quantities implied by a config");
  ana->add_option("--config", analyze_config, "JSON experiment description")
      ->required()
      ->check(CLI::ExistingFile);
  ana->add_option("--draws", draws, "Channel draws for the rate estimates")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      dfrc::ExperimentConfig cfg =
          dfrc::ExperimentConfig::from_json_file(config_path);
      if (opt_sweep->count() > 0) cfg.sweep = dfrc::parse_sweep(sweep_text);
      if (opt_trials->count() > 0) cfg.trials = trials;
      if (opt_seed->count() > 0) cfg.master_seed = seed;
      if (opt_out->count() > 0) cfg.out = out_path;
      if (opt_format->count() > 0) cfg.format = format;
      if (opt_schemes->count() > 0) {
        cfg.schemes = dfrc::parse_schemes(schemes_csv);
      }
      if (opt_detector->count() > 0) {
        cfg.detector = detector_name == "exhaustive"
                           ? dfrc::DetectorStrategy::kExhaustive
                           : dfrc::DetectorStrategy::kSdr;
      }
      return do_simulate(std::move(cfg));
    }
    if (ver->parsed()) {
      return do_verify(verify_seed);
    }
    dfrc::ExperimentConfig cfg =
        dfrc::ExperimentConfig::from_json_file(analyze_config);
    cfg.validate();
    return do_analyze(cfg, draws);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
