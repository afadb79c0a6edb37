#include <cmath>
#include <stdexcept>
#include <vector>

#include "dfrc/receivers.hpp"

namespace dfrc {

ProjectedProblem project(const StackedModel& model) {
  return {model.y_tilde, model.G};
}

Eigen::VectorXi detect_projected(const CVec& y_tilde, const CMat& G,
                                 const Constellation& constel,
                                 DetectorStrategy strategy, Rng& rng,
                                 const SdrParams& params,
                                 bool* non_identifiable) {
  const int n = static_cast<int>(G.cols());
  if (non_identifiable != nullptr) *non_identifiable = false;
  // A vanishing reduced matrix leaves every candidate with the same
  // residual; return the canonical all-first-symbol point and flag it.
  if (G.norm() <= 1e-12 * std::sqrt(static_cast<double>(G.size()))) {
    if (non_identifiable != nullptr) *non_identifiable = true;
    return Eigen::VectorXi::Zero(n);
  }
  if (strategy == DetectorStrategy::kExhaustive) {
    return exhaustive_detect(G, y_tilde, constel, kJointEnumBudget,
                             params.tie_tol);
  }
  return detect_qpsk_sdr(G, y_tilde, constel, rng, params);
}

CVec ls_target_estimate(const StackedModel& model, const CVec& x_hat) {
  if (x_hat.size() != model.A_c.cols()) {
    throw std::invalid_argument("ls_target_estimate: x_hat has wrong length");
  }
  const CVec r = model.y - model.A_c * x_hat;
  return model.Xi * (model.A_r.adjoint() * r);
}

DetectionResult detect_sic(const StackedModel& model,
                           const Constellation& constel, Rng& rng,
                           const SdrParams& params, SicStage1 stage1,
                           double stage1_noise_floor) {
  const CMat Y = linalg::unvec(model.y, model.M_r, model.L);

  DetectionResult res;
  res.method_tag = "sic";
  res.x_indices.resize(static_cast<Index>(model.L) * model.N_t);
  CMat X_hat(model.N_t, model.L);
  if (stage1 == SicStage1::kMmse) {
    if (!(stage1_noise_floor > 0.0)) {
      throw std::invalid_argument(
          "detect_sic: the mmse stage needs a positive noise floor");
    }
    double es = 0.0;
    for (const cplx& p : constel.points) es += std::norm(p);
    es /= constel.size();
    CMat K = es * (model.H_c * model.H_c.adjoint());
    K.diagonal().array() += stage1_noise_floor;
    const CMat soft = es * (model.H_c.adjoint() * K.ldlt().solve(Y));
    for (int l = 0; l < model.L; ++l) {
      for (int i = 0; i < model.N_t; ++i) {
        const int idx = constel.index_of(soft(i, l));
        res.x_indices(static_cast<Index>(l) * model.N_t + i) = idx;
        X_hat(i, l) = constel.points[static_cast<std::size_t>(idx)];
      }
    }
  } else {
    const bool enumerable =
        within_enum_budget(constel.size(), model.N_t, kSnapshotEnumBudget);
    for (int l = 0; l < model.L; ++l) {
      const Eigen::VectorXi idx =
          enumerable ? exhaustive_detect(model.H_c, Y.col(l), constel,
                                         kSnapshotEnumBudget, params.tie_tol)
                     : detect_qpsk_sdr(model.H_c, Y.col(l), constel, rng,
                                       params);
      res.x_indices.segment(static_cast<Index>(l) * model.N_t, model.N_t) =
          idx;
      for (int i = 0; i < model.N_t; ++i) {
        X_hat(i, l) = constel.points[static_cast<std::size_t>(idx(i))];
      }
    }
  }
  res.x_hat = linalg::vec(X_hat);
  res.objective = (Y - model.H_c * X_hat).squaredNorm();
  res.h_hat = ls_target_estimate(model, res.x_hat);
  return res;
}

DetectionResult exhaustive_joint_ml(const StackedModel& model,
                                    const Constellation& constel,
                                    double tie_tol) {
  const int n = model.L * model.N_t;
  const int B = constel.size();
  if (!within_enum_budget(B, n, kJointEnumBudget)) {
    throw std::invalid_argument(
        "exhaustive_joint_ml: candidate count exceeds the enumeration "
        "budget");
  }
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(B);

  const Eigen::HouseholderQR<CMat> qr(model.A_r);
  std::vector<double> objective(total);
  std::vector<int> dig(static_cast<std::size_t>(n));
  CVec x(n), r(model.y.size()), h(model.A_r.cols());

  auto fill_candidate = [&](std::uint64_t t) {
    std::uint64_t v = t;
    for (int k = n - 1; k >= 0; --k) {
      dig[static_cast<std::size_t>(k)] =
          static_cast<int>(v % static_cast<std::uint64_t>(B));
      v /= static_cast<std::uint64_t>(B);
    }
    for (int k = 0; k < n; ++k) {
      x(k) = constel.points[static_cast<std::size_t>(
          dig[static_cast<std::size_t>(k)])];
    }
  };

  for (std::uint64_t t = 0; t < total; ++t) {
    fill_candidate(t);
    r = model.y - model.A_c * x;
    h = qr.solve(r);
    objective[t] = (r - model.A_r * h).squaredNorm();
  }

  double best = objective[0];
  for (std::uint64_t t = 1; t < total; ++t) {
    if (objective[t] < best) best = objective[t];
  }
  std::uint64_t winner = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    if (objective[t] <= best + tie_tol) {
      winner = t;
      break;
    }
  }

  DetectionResult res;
  res.method_tag = "joint_ml";
  fill_candidate(winner);
  res.x_indices.resize(n);
  for (int k = 0; k < n; ++k) res.x_indices(k) = dig[static_cast<std::size_t>(k)];
  res.x_hat = x;
  r = model.y - model.A_c * x;
  res.h_hat = qr.solve(r);
  res.objective = (r - model.A_r * res.h_hat).squaredNorm();
  return res;
}

DetectionResult run_projection_receiver(const StackedModel& model,
                                        const Constellation& constel,
                                        DetectorStrategy strategy, Rng& rng,
                                        const SdrParams& params) {
  DetectionResult res;
  res.method_tag = strategy == DetectorStrategy::kExhaustive
                       ? "projection_exhaustive"
                       : "projection_sdr";
  res.x_indices = detect_projected(model.y_tilde, model.G, constel, strategy,
                                   rng, params, &res.non_identifiable);
  res.x_hat = indices_to_symbols(res.x_indices, constel);
  res.objective = (model.y_tilde - model.G * res.x_hat).squaredNorm();
  res.h_hat = ls_target_estimate(model, res.x_hat);
  return res;
}

DetectionResult run_sic_receiver(const StackedModel& model,
                                 const Constellation& constel, Rng& rng,
                                 const SdrParams& params, SicStage1 stage1,
                                 double stage1_noise_floor) {
  return detect_sic(model, constel, rng, params, stage1, stage1_noise_floor);
}

}  // namespace dfrc
