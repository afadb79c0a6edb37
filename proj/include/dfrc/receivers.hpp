#pragma once

#include <cstdint>
#include <string>

#include "dfrc/constellation.hpp"
#include "dfrc/linalg.hpp"
#include "dfrc/rng.hpp"
#include "dfrc/scene.hpp"

namespace dfrc {

enum class DetectorStrategy { kExhaustive, kSdr };

/// Knobs of the semidefinite-relaxation detector. Defaults are the
/// documented operating point; all are config-exposed.
struct SdrParams {
  int rounding_samples = 100;  // randomized rounding draws
  double tol = 1e-4;           // relative objective-stall threshold: done
                               // when three consecutive sweeps improve the
                               // objective by less than tol*(1+|f|);
                               // rounding quality saturates well above this
  int max_sweeps = 3000;       // sweep cap before a solver error is raised
  int rank = 0;                // factor rows; 0 = ceil(sqrt(2(n+1))), max 16
  double tie_tol = 1e-12;      // equal-objective window for tie breaking
};

struct SdrDiagnostics {
  int sweeps = 0;
  double movement = 0.0;
};

/// Result of one receiver run on a stacked block.
struct DetectionResult {
  Eigen::VectorXi x_indices;  // detected symbol indices, length L*N_t
  CVec x_hat;                 // alphabet-exact detected symbols
  CVec h_hat;                 // target-response estimate, length M_r*M_t
  double objective = 0.0;     // achieved residual of the scheme's criterion
  std::string method_tag;
  bool non_identifiable = false;  // reduced matrix was numerically zero
};

/// Candidate budgets: full-block enumeration and per-snapshot enumeration.
inline constexpr std::uint64_t kJointEnumBudget = 1ull << 20;
inline constexpr std::uint64_t kSnapshotEnumBudget = 1ull << 16;

/// True when alphabet^n stays within cap.
bool within_enum_budget(int alphabet, int n, std::uint64_t cap);

/// Exact argmin of ||y - H x|| over x in constellation^n by meet-in-the-
/// middle enumeration in lexicographic symbol-index order. Ties within
/// tie_tol resolve to the lexicographically smallest index vector. Throws
/// std::invalid_argument when alphabet^n exceeds cap.
Eigen::VectorXi exhaustive_detect(const CMat& H, const CVec& y,
                                  const Constellation& constel,
                                  std::uint64_t cap,
                                  double tie_tol = 1e-12);

/// Relax min ||b - H s||^2 over s in {-1,+1}^n to a diagonally constrained
/// semidefinite program, solve it by coordinate minimization over a
/// normalized low-rank factorization, and round with rounding_samples
/// Gaussian draws plus deterministic candidates (including the sign of the
/// unconstrained least-squares solution). Returns the best sign vector;
/// ties resolve to the lexicographically smallest with +1 ordered before
/// -1. Throws std::runtime_error with iteration diagnostics when the solver
/// does not reach tol within max_sweeps.
RVec sdr_relax_and_round(const RMat& H, const RVec& b, Rng& rng,
                         const SdrParams& params,
                         SdrDiagnostics* diag = nullptr);

/// QPSK front end for sdr_relax_and_round: builds the real-valued lifting
/// with interleaved (real, imaginary) columns so sign-vector order matches
/// symbol-index order, then maps signs back to indices.
Eigen::VectorXi detect_qpsk_sdr(const CMat& H, const CVec& y,
                                const Constellation& constel, Rng& rng,
                                const SdrParams& params);

struct ProjectedProblem {
  CVec y_tilde;
  CMat G;
};

/// The reduced detection problem after nulling the radar subspace.
ProjectedProblem project(const StackedModel& model);

/// Argmin of ||y_tilde - G x|| over the alphabet, by enumeration or by the
/// semidefinite relaxation. A numerically zero G is flagged through
/// non_identifiable (when given) and yields the all-first-symbol vector.
Eigen::VectorXi detect_projected(const CVec& y_tilde, const CMat& G,
                                 const Constellation& constel,
                                 DetectorStrategy strategy, Rng& rng,
                                 const SdrParams& params,
                                 bool* non_identifiable = nullptr);

/// Closed-form least-squares target estimate given detected symbols:
/// Xi * A_r^H * (y - A_c x).
CVec ls_target_estimate(const StackedModel& model, const CVec& x_hat);

/// First-stage symbol search of the cancellation receiver. kMlOrSdr is the
/// strongest baseline: per-snapshot enumeration within budget, semidefinite
/// relaxation otherwise. kMmse is the classical linear baseline: a
/// per-snapshot minimum mean-square-error filter followed by nearest-point
/// slicing, the kind of stage whose residual errors leak into the target
/// estimate once the radar return is non-negligible.
enum class SicStage1 { kMlOrSdr, kMmse };

/// Two-stage interference-cancellation receiver: per-snapshot communication
/// detection first (treating the radar return as noise), then the
/// least-squares target estimate on the subtracted residual. objective
/// holds the stage-1 criterion ||y - A_c x_hat||^2. For kMmse,
/// stage1_noise_floor is the interference-plus-noise power per receive
/// entry used by the filter and must be positive.
DetectionResult detect_sic(const StackedModel& model,
                           const Constellation& constel, Rng& rng,
                           const SdrParams& params,
                           SicStage1 stage1 = SicStage1::kMlOrSdr,
                           double stage1_noise_floor = 0.0);

/// Brute-force joint minimization of ||y - A_c x - A_r h|| over the symbol
/// alphabet with the inner least-squares target estimate solved per
/// candidate by QR. Independent of the projected path; used as the oracle.
/// Throws std::invalid_argument when the alphabet budget is exceeded.
DetectionResult exhaustive_joint_ml(const StackedModel& model,
                                    const Constellation& constel,
                                    double tie_tol = 1e-12);

/// Projection receiver: null the radar subspace, detect the symbols on the
/// reduced problem, then estimate the target response.
DetectionResult run_projection_receiver(const StackedModel& model,
                                        const Constellation& constel,
                                        DetectorStrategy strategy, Rng& rng,
                                        const SdrParams& params);

/// Interference-cancellation baseline wrapped as a full receiver run.
DetectionResult run_sic_receiver(const StackedModel& model,
                                 const Constellation& constel, Rng& rng,
                                 const SdrParams& params,
                                 SicStage1 stage1 = SicStage1::kMlOrSdr,
                                 double stage1_noise_floor = 0.0);

/// Map detected indices to alphabet-exact symbols.
CVec indices_to_symbols(const Eigen::VectorXi& idx,
                        const Constellation& constel);

}  // namespace dfrc
