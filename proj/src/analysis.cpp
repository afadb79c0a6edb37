#include "dfrc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dfrc {

double snr_projected_theory(const SystemConfig& cfg) {
  return cfg.P_c / cfg.sigma2;
}

double sinr_sic_closed_form(const SystemConfig& cfg, const ScenePrior& prior) {
  // E||H_c X_c||^2 = L * M_r * P_c for i.i.d. CN(0,1) channel entries and
  // per-entry symbol power P_c / N_t; E||H_r X_r||^2 = P_r * L / M_t times
  // the expected squared response norm (one per unit-gain path);
  // E||N||^2 = L * M_r * sigma2. The common factor L cancels.
  const double signal = cfg.M_r * cfg.P_c;
  const double radar = prior.num_paths * cfg.P_r / cfg.M_t;
  const double noise = cfg.M_r * cfg.sigma2;
  return signal / (radar + noise);
}

double sinr_sic_empirical(const SystemConfig& cfg, const ScenePrior& prior,
                          int trials, Rng& rng) {
  if (trials < 1) {
    throw std::invalid_argument("sinr_sic_empirical: trials must be >= 1");
  }
  const Constellation constel = cfg.make_constellation();
  const CMat X_r = gen_orthogonal_waveform(cfg.M_t, cfg.L, cfg.P_r);
  double signal = 0.0, radar = 0.0, noise = 0.0;
  for (int t = 0; t < trials; ++t) {
    const CMat H_c = gen_comm_channel(rng, cfg.M_r, cfg.N_t);
    const TargetScene target = random_target_scene(rng, prior);
    const CMat H_r =
        build_target_response(target, cfg.M_r, cfg.M_t, cfg.d_over_lambda);
    const CMat X_c = gen_symbols(rng, constel, cfg.N_t, cfg.L);
    const CMat N = gen_noise(rng, cfg.M_r, cfg.L, cfg.sigma2);
    signal += (H_c * X_c).squaredNorm();
    radar += (H_r * X_r).squaredNorm();
    noise += N.squaredNorm();
  }
  return signal / (radar + noise);
}

double crb_target_response(const CMat& R, double sigma2, int M_r, int L) {
  if (R.rows() != R.cols()) {
    throw std::invalid_argument("crb_target_response: R is not square");
  }
  if (linalg::numerical_rank(R) < R.cols()) {
    throw std::runtime_error("crb_target_response: R is singular");
  }
  const CMat R_inv = R.llt().solve(CMat::Identity(R.rows(), R.cols()));
  return sigma2 * M_r / static_cast<double>(L) * R_inv.trace().real();
}

RVec waterfill(const RVec& eigenvalues, double snr, double total_power) {
  if (snr <= 0.0) {
    throw std::invalid_argument("waterfill: snr must be positive");
  }
  if (total_power < 0.0) {
    throw std::invalid_argument("waterfill: total_power must be nonnegative");
  }
  const Index n = eigenvalues.size();
  RVec p = RVec::Zero(n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return eigenvalues(a) > eigenvalues(b); });

  // Grow the active set from the strongest channel down; the water level
  // for k active channels is (total + sum of inverse gains) / k, valid
  // while the weakest active channel still receives positive power.
  Index active = 0;
  double inv_sum = 0.0;
  double level = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double lam = eigenvalues(order[static_cast<std::size_t>(k)]);
    if (lam <= 0.0) break;
    const double inv = 1.0 / (snr * lam);
    const double candidate = (total_power + inv_sum + inv) / double(k + 1);
    if (candidate <= inv) break;
    inv_sum += inv;
    level = candidate;
    active = k + 1;
  }
  for (Index k = 0; k < active; ++k) {
    const Index j = order[static_cast<std::size_t>(k)];
    p(j) = level - 1.0 / (snr * eigenvalues(j));
  }
  return p;
}

namespace {

double rate_at(const RVec& lambda, const RVec& powers, double snr) {
  double rate = 0.0;
  for (Index j = 0; j < lambda.size(); ++j) {
    if (powers(j) > 0.0 && lambda(j) > 0.0) {
      rate += std::log2(1.0 + snr * lambda(j) * powers(j));
    }
  }
  return rate;
}

}  // namespace

RateReport ergodic_rates(const CMat& H_c, const SystemConfig& cfg,
                         double sinr_sic) {
  if (sinr_sic < 0.0) {
    throw std::invalid_argument("ergodic_rates: sinr_sic must be >= 0");
  }
  RateReport report;
  const linalg::HermitianEig eig = linalg::hermitian_eig(H_c.adjoint() * H_c);
  report.eigenvalues = eig.values.cwiseMax(0.0);

  const double snr = snr_projected_theory(cfg);
  report.powers = waterfill(report.eigenvalues, snr, 1.0);
  report.rate_comm_only = rate_at(report.eigenvalues, report.powers, snr);
  report.rate_projection =
      (1.0 - double(cfg.M_t) / double(cfg.L)) * report.rate_comm_only;
  if (sinr_sic > 0.0) {
    const RVec p2 = waterfill(report.eigenvalues, sinr_sic, 1.0);
    report.rate_sic = rate_at(report.eigenvalues, p2, sinr_sic);
  }
  return report;
}

double rate_projection_via_projected_spectrum(const CMat& H_c, const CMat& G,
                                              const SystemConfig& cfg) {
  const linalg::HermitianEig chan = linalg::hermitian_eig(H_c.adjoint() * H_c);
  const RVec lambda = chan.values.cwiseMax(0.0);
  const double snr = snr_projected_theory(cfg);
  const RVec powers = waterfill(lambda, snr, 1.0);

  // The projected Gram spectrum holds each channel eigenvalue with
  // multiplicity L - M_t (sorted descending, groups stay contiguous), plus
  // M_t * N_t zeros. Pair each copy with its channel's allocation and
  // average the per-snapshot sum.
  const linalg::HermitianEig proj = linalg::hermitian_eig(G.adjoint() * G);
  const Index copies = cfg.L - cfg.M_t;
  double rate = 0.0;
  for (Index j = 0; j < lambda.size(); ++j) {
    if (powers(j) <= 0.0) continue;
    for (Index c = 0; c < copies; ++c) {
      const double mu = std::max(proj.values(j * copies + c), 0.0);
      rate += std::log2(1.0 + snr * mu * powers(j));
    }
  }
  return rate / double(cfg.L);
}

double ber(const CVec& x_true, const CVec& x_hat,
           const Constellation& constel) {
  if (x_true.size() != x_hat.size() || x_true.size() == 0) {
    throw std::invalid_argument("ber: vectors empty or of different length");
  }
  long wrong = 0;
  for (Index i = 0; i < x_true.size(); ++i) {
    wrong += constel.bit_distance(constel.index_of(x_true(i)),
                                  constel.index_of(x_hat(i)));
  }
  return double(wrong) /
         double(x_true.size() * constel.bits_per_symbol);
}

double bler(const CVec& x_true, const CVec& x_hat,
            const Constellation& constel, Index block_symbols) {
  if (x_true.size() != x_hat.size() || x_true.size() == 0) {
    throw std::invalid_argument("bler: vectors empty or of different length");
  }
  if (block_symbols <= 0 || x_true.size() % block_symbols != 0) {
    throw std::invalid_argument(
        "bler: length is not a multiple of the block size");
  }
  const Index blocks = x_true.size() / block_symbols;
  Index bad = 0;
  for (Index b = 0; b < blocks; ++b) {
    for (Index i = 0; i < block_symbols; ++i) {
      const Index k = b * block_symbols + i;
      if (constel.index_of(x_true(k)) != constel.index_of(x_hat(k))) {
        ++bad;
        break;
      }
    }
  }
  return double(bad) / double(blocks);
}

double nmse(const CVec& h_true, const CVec& h_hat) {
  if (h_true.size() != h_hat.size()) {
    throw std::invalid_argument("nmse: vectors of different length");
  }
  const double ref = h_true.squaredNorm();
  if (ref == 0.0) {
    throw std::invalid_argument("nmse: reference vector is zero");
  }
  return (h_hat - h_true).squaredNorm() / ref;
}

}  // namespace dfrc
