#pragma once

#include "dfrc/constellation.hpp"
#include "dfrc/linalg.hpp"
#include "dfrc/rng.hpp"
#include "dfrc/scene.hpp"

namespace dfrc {

/// Post-projection SNR of the communication link: P_c / sigma2. The
/// radar-nulling projection preserves the interference-free SNR.
double snr_projected_theory(const SystemConfig& cfg);

/// Expected pre-cancellation SINR when the radar return is treated as
/// noise: E||H_c X_c||^2 / (E||H_r X_r||^2 + E||N||^2) in closed form under
/// the scene prior.
double sinr_sic_closed_form(const SystemConfig& cfg, const ScenePrior& prior);

/// Monte-Carlo estimate of the same ratio from fresh scene draws.
double sinr_sic_empirical(const SystemConfig& cfg, const ScenePrior& prior,
                          int trials, Rng& rng);

/// Estimation bound for the vectorized target response under waveform
/// covariance R: sigma2 * M_r / L * trace(R^-1). Throws std::runtime_error
/// when R is singular.
double crb_target_response(const CMat& R, double sigma2, int M_r, int L);

/// Allocations maximizing sum log2(1 + snr * lambda_j * p_j) subject to
/// sum p_j <= total_power, p >= 0. Returned in the order of `eigenvalues`.
RVec waterfill(const RVec& eigenvalues, double snr, double total_power);

struct RateReport {
  RVec eigenvalues;           // of H_c^H H_c, descending
  RVec powers;                // interference-free water-filling allocations
  double rate_comm_only = 0;  // no radar on the air
  double rate_sic = 0;        // radar treated as noise before cancellation
  double rate_projection = 0; // radar nulled, (1 - M_t/L) snapshot fraction
};

/// Rates for one channel realization. rate_projection is exactly
/// (1 - M_t/L) * rate_comm_only; rate_sic water-fills at sinr_sic.
RateReport ergodic_rates(const CMat& H_c, const SystemConfig& cfg,
                         double sinr_sic);

/// Independent route to the projection rate through the spectrum of G^H G:
/// the nonzero eigenvalues replicate each channel eigenvalue L - M_t times,
/// so the per-snapshot rate carries the same fraction.
double rate_projection_via_projected_spectrum(const CMat& H_c, const CMat& G,
                                              const SystemConfig& cfg);

/// Fraction of wrong bits under the constellation's bit labels. Entries
/// must be alphabet-exact. Throws std::invalid_argument on length mismatch.
double ber(const CVec& x_true, const CVec& x_hat,
           const Constellation& constel);

/// Fraction of blocks of block_symbols consecutive symbols containing at
/// least one symbol error. Throws when sizes mismatch or do not divide.
double bler(const CVec& x_true, const CVec& x_hat,
            const Constellation& constel, Index block_symbols);

/// ||h_hat - h_true||^2 / ||h_true||^2. Throws on zero reference.
double nmse(const CVec& h_true, const CVec& h_hat);

}  // namespace dfrc
