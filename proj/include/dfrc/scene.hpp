#pragma once

#include <string>
#include <vector>

#include "dfrc/constellation.hpp"
#include "dfrc/linalg.hpp"
#include "dfrc/rng.hpp"

namespace dfrc {

/// Static dimensions and powers of the uplink joint radar/communication
/// receiver. Defaults follow the evaluated operating point.
struct SystemConfig {
  int M_t = 4;  // radar transmit antennas
  int M_r = 8;  // receive antennas
  int N_t = 8;  // uplink user transmit antennas
  int L = 20;   // snapshots per block
  double P_c = 1.0;                    // communication power (W)
  double P_r = 0.15848931924611134;    // radar power budget (W), -8 dB
  double sigma2 = 0.01;                // per-entry noise power, -20 dB
  double d_over_lambda = 0.5;          // array element spacing
  std::string constellation = "qpsk";

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Alphabet scaled so each transmit entry carries power P_c / N_t.
  Constellation make_constellation() const;
};

/// Prior for the random target scene.
struct ScenePrior {
  int num_paths = 3;
  double max_angle_deg = 60.0;  // angles uniform in +/- this
};

struct TargetPath {
  double phi = 0.0;    // angle of arrival (rad)
  double theta = 0.0;  // angle of departure (rad)
  cplx gain{0.0, 0.0};
};

struct TargetScene {
  std::vector<TargetPath> paths;
};

/// One realization of all propagation quantities for a block.
struct Scene {
  CMat H_c;  // M_r x N_t communication channel
  CMat H_r;  // M_r x M_t target response
  CMat X_r;  // M_t x L radar waveform
  CMat R;    // M_t x M_t per-snapshot waveform covariance, X_r X_r^H / L
  TargetScene target;
};

/// Stacked (vectorized) block model together with the radar-nulling
/// projector and the reduced communication matrix.
struct StackedModel {
  int L = 0, M_t = 0, M_r = 0, N_t = 0;
  CVec y;        // vec of the received block, length L*M_r
  CVec y_tilde;  // Gamma * y
  CMat A_r;      // X_r^T kron I, maps vec(H_r) to vec(H_r X_r)
  CMat A_c;      // I kron H_c, maps vec(X_c) to vec(H_c X_c)
  CMat Gamma;    // orthogonal projector annihilating range(A_r)
  CMat Xi;       // (A_r^H A_r)^-1
  CMat G;        // Gamma * A_c
  CMat P_perp;   // L x L snapshot-domain factor of Gamma
  CMat H_c;      // copy for per-snapshot processing
};

/// Unit-norm uniform-linear-array steering vector; entry k has phase
/// -2*pi*k*d_over_lambda*sin(alpha).
CVec steering(int M, double alpha_rad, double d_over_lambda);

/// Sum of gain * a_rx(phi) a_tx(theta)^H over the scene's paths.
CMat build_target_response(const TargetScene& scene, int M_r, int M_t,
                           double d_over_lambda);

/// Angles uniform in +/- prior.max_angle_deg, gains CN(0,1).
TargetScene random_target_scene(Rng& rng, const ScenePrior& prior);

/// i.i.d. CN(0,1) entries.
CMat gen_comm_channel(Rng& rng, int M_r, int N_t);

/// Scaled DFT rows: X_r X_r^H = (P_r * L / M_t) I, so the per-snapshot
/// covariance R = X_r X_r^H / L spends the full budget, trace(R) = P_r.
CMat gen_orthogonal_waveform(int M_t, int L, double P_r);

/// N_t x L block of uniformly drawn constellation points.
CMat gen_symbols(Rng& rng, const Constellation& constel, int N_t, int L);

/// M_r x L noise block with i.i.d. CN(0, sigma2) entries.
CMat gen_noise(Rng& rng, int M_r, int L, double sigma2);

/// H_r X_r + H_c X_c + noise. With sigma2 == 0 nothing is drawn from rng and
/// the result is exactly the noiseless sum.
CMat synthesize_block(const Scene& scene, const CMat& X_c, Rng& rng,
                      double sigma2);

/// Builds the stacked model for a received block. Requires X_r^T with full
/// column rank; throws std::runtime_error naming X_r otherwise.
StackedModel stack_model(const Scene& scene, const CMat& Y);

}  // namespace dfrc
