#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>
#include <utility>

#include "dfrc/harness.hpp"

namespace dfrc {

int thread_count() {
  if (const char* env = std::getenv("DFRCSIM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw != 0 ? static_cast<int>(hw) : 1;
}

namespace {

constexpr int kSchemeCount = 4;

struct TrialOut {
  std::array<double, kSchemeCount> ber{}, bler{}, nmse{}, tse{};
  std::array<bool, kSchemeCount> has{};
  double rate_sic = 0.0, rate_projection = 0.0, rate_comm = 0.0;
  double snr_num = 0.0, snr_den = 0.0;
  double sinr_sig = 0.0, sinr_radar = 0.0, sinr_noise = 0.0;
  double h_norm2 = 0.0;
};

TrialOut run_trial(const SystemConfig& sys, const ScenePrior& prior,
                   const Constellation& constel,
                   const std::vector<Scheme>& schemes,
                   DetectorStrategy detector, const SdrParams& sdr,
                   SicStage1 sic_stage, double sinr_point,
                   std::uint64_t seed) {
  // Fixed stream layout: stream 1 draws the scene, stream 2 seeds each
  // scheme's detector, so the draws are independent of scheme selection.
  Rng rng_scene(derive_seed(seed, 1, 0));
  Scene scene;
  scene.H_c = gen_comm_channel(rng_scene, sys.M_r, sys.N_t);
  scene.target = random_target_scene(rng_scene, prior);
  scene.H_r = build_target_response(scene.target, sys.M_r, sys.M_t,
                                    sys.d_over_lambda);
  scene.X_r = gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  scene.R = scene.X_r * scene.X_r.adjoint() / double(sys.L);
  const CMat X_c = gen_symbols(rng_scene, constel, sys.N_t, sys.L);
  const CMat noise = gen_noise(rng_scene, sys.M_r, sys.L, sys.sigma2);
  const CMat Y = scene.H_r * scene.X_r + scene.H_c * X_c + noise;

  const StackedModel model = stack_model(scene, Y);
  const CVec x_true = linalg::vec(X_c);
  const CVec h_true = linalg::vec(scene.H_r);

  TrialOut out;
  out.h_norm2 = h_true.squaredNorm();
  const Index block = static_cast<Index>(sys.L) * sys.N_t;

  for (Scheme s : schemes) {
    const int ord = static_cast<int>(s);
    Rng rng_det(derive_seed(seed, 2, static_cast<std::uint64_t>(ord)));
    DetectionResult res;
    switch (s) {
      case Scheme::kSic: {
        const double floor =
            prior.num_paths * sys.P_r / (double(sys.M_t) * sys.M_r) +
            sys.sigma2;
        res = run_sic_receiver(model, constel, rng_det, sdr, sic_stage, floor);
        break;
      }
      case Scheme::kProjection:
        res = run_projection_receiver(model, constel, detector, rng_det, sdr);
        break;
      case Scheme::kJointMl:
        res = exhaustive_joint_ml(model, constel);
        break;
      case Scheme::kGenie:
        res.x_hat = x_true;
        res.h_hat = ls_target_estimate(model, x_true);
        res.method_tag = "genie";
        break;
    }
    out.has[static_cast<std::size_t>(ord)] = true;
    if (s != Scheme::kGenie) {
      out.ber[static_cast<std::size_t>(ord)] = ber(x_true, res.x_hat, constel);
      out.bler[static_cast<std::size_t>(ord)] =
          bler(x_true, res.x_hat, constel, block);
    }
    out.nmse[static_cast<std::size_t>(ord)] = nmse(h_true, res.h_hat);
    out.tse[static_cast<std::size_t>(ord)] =
        (res.h_hat - h_true).squaredNorm();
  }

  const RateReport rates = ergodic_rates(scene.H_c, sys, sinr_point);
  out.rate_sic = rates.rate_sic;
  out.rate_projection = rates.rate_projection;
  out.rate_comm = rates.rate_comm_only;

  out.snr_num = (model.G * x_true).squaredNorm();
  out.snr_den = (model.Gamma * linalg::vec(noise)).squaredNorm();
  out.sinr_sig = (scene.H_c * X_c).squaredNorm();
  out.sinr_radar = (scene.H_r * scene.X_r).squaredNorm();
  out.sinr_noise = noise.squaredNorm();
  return out;
}

std::pair<double, double> mean_se(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

void append_rows(std::vector<MetricsRecord>& records,
                 const ExperimentConfig& cfg, const SystemConfig& sys,
                 double sweep_value, const std::vector<TrialOut>& slots) {
  const auto trials = static_cast<std::uint64_t>(slots.size());
  auto add = [&](const std::string& scheme, const std::string& metric,
                 double mean, double se) {
    records.push_back({cfg.sweep.variable, sweep_value, scheme, metric, mean,
                       se, trials, cfg.master_seed});
  };
  auto collect = [&](auto member, int ord) {
    std::vector<double> v;
    v.reserve(slots.size());
    for (const TrialOut& t : slots) {
      v.push_back((t.*member)[static_cast<std::size_t>(ord)]);
    }
    return v;
  };

  for (Scheme s : cfg.schemes) {
    const int ord = static_cast<int>(s);
    const std::string name = scheme_name(s);
    if (s != Scheme::kGenie) {
      const auto [bm, bs] = mean_se(collect(&TrialOut::ber, ord));
      add(name, "ber", bm, bs);
      const auto [lm, ls] = mean_se(collect(&TrialOut::bler, ord));
      add(name, "bler", lm, ls);
    }
    if (cfg.nmse_aggregation == "ratio_of_means") {
      double tse_sum = 0.0, ref_sum = 0.0;
      for (const TrialOut& t : slots) {
        tse_sum += t.tse[static_cast<std::size_t>(ord)];
        ref_sum += t.h_norm2;
      }
      add(name, "nmse", tse_sum / ref_sum, 0.0);
    } else {
      const auto [nm, ns] = mean_se(collect(&TrialOut::nmse, ord));
      add(name, "nmse", nm, ns);
    }
    const auto [tm, ts] = mean_se(collect(&TrialOut::tse, ord));
    add(name, "tse", tm, ts);

    if (s == Scheme::kSic || s == Scheme::kProjection) {
      std::vector<double> v;
      v.reserve(slots.size());
      for (const TrialOut& t : slots) {
        v.push_back(s == Scheme::kSic ? t.rate_sic : t.rate_projection);
      }
      const auto [rm, rs] = mean_se(v);
      add(name, "rate", rm, rs);
    }
    if (s == Scheme::kProjection) {
      double num = 0.0, den = 0.0;
      for (const TrialOut& t : slots) {
        num += t.snr_num;
        den += t.snr_den;
      }
      add(name, "snr_p_empirical", num / den, 0.0);
    }
    if (s == Scheme::kSic) {
      double sig = 0.0, radar = 0.0, noise = 0.0;
      for (const TrialOut& t : slots) {
        sig += t.sinr_sig;
        radar += t.sinr_radar;
        noise += t.sinr_noise;
      }
      add(name, "sinr_sic_empirical", sig / (radar + noise), 0.0);
    }
  }

  {
    std::vector<double> v;
    v.reserve(slots.size());
    for (const TrialOut& t : slots) v.push_back(t.rate_comm);
    const auto [rm, rs] = mean_se(v);
    add("theory", "rate_comm_only", rm, rs);
  }
  add("theory", "snr_projected", snr_projected_theory(sys), 0.0);
  const CMat X_r = gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  const CMat R = X_r * X_r.adjoint() / double(sys.L);
  add("theory", "crb", crb_target_response(R, sys.sigma2, sys.M_r, sys.L),
      0.0);
}

}  // namespace

std::vector<MetricsRecord> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<MetricsRecord> records;
  const SicStage1 sic_stage =
      cfg.sic_stage1 == "mmse" ? SicStage1::kMmse : SicStage1::kMlOrSdr;

  for (std::size_t pi = 0; pi < cfg.sweep.values.size(); ++pi) {
    const double value = cfg.sweep.values[pi];
    const SystemConfig sys =
        apply_sweep_value(cfg.system, cfg.sweep.variable, value);
    const Constellation constel = sys.make_constellation();

    Rng probe_rng(derive_seed(cfg.master_seed, 0x51AE5EEDull, pi));
    const double sinr_point =
        sinr_sic_empirical(sys, cfg.scene, cfg.sinr_probe_trials, probe_rng);

    std::vector<TrialOut> slots(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto work = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= cfg.trials || failed.load()) break;
        try {
          slots[static_cast<std::size_t>(t)] = run_trial(
              sys, cfg.scene, constel, cfg.schemes, cfg.detector, cfg.sdr,
              sic_stage, sinr_point,
              derive_seed(cfg.master_seed, pi, static_cast<std::uint64_t>(t)));
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          break;
        }
      }
    };

    const int workers = std::min(thread_count(), cfg.trials);
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    append_rows(records, cfg, sys, value, slots);
  }
  return records;
}

}  // namespace dfrc
