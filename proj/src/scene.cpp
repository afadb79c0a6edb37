#include "dfrc/scene.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dfrc {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string("SystemConfig.") + field + " " +
                                what);
  }
}

}  // namespace

void SystemConfig::validate() const {
  require(M_t >= 1, "M_t", "must be at least 1");
  require(M_r >= 1, "M_r", "must be at least 1");
  require(N_t >= 1, "N_t", "must be at least 1");
  require(L >= 1, "L", "must be at least 1");
  require(L > M_t, "L", "must exceed M_t so the waveform rows stay independent");
  require(P_c > 0.0, "P_c", "must be positive");
  require(P_r > 0.0, "P_r", "must be positive");
  require(sigma2 > 0.0, "sigma2", "must be positive");
  require(d_over_lambda > 0.0, "d_over_lambda", "must be positive");
  require(constellation == "qpsk", "constellation", "must be \"qpsk\"");
}

Constellation SystemConfig::make_constellation() const {
  return Constellation::qpsk(P_c / N_t);
}

CVec steering(int M, double alpha_rad, double d_over_lambda) {
  CVec a(M);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  const double step = -2.0 * std::numbers::pi * d_over_lambda *
                      std::sin(alpha_rad);
  for (int k = 0; k < M; ++k) {
    a(k) = scale * std::polar(1.0, step * k);
  }
  return a;
}

CMat build_target_response(const TargetScene& scene, int M_r, int M_t,
                           double d_over_lambda) {
  if (scene.paths.empty()) {
    throw std::invalid_argument("build_target_response: scene has no paths");
  }
  CMat H = CMat::Zero(M_r, M_t);
  for (const TargetPath& p : scene.paths) {
    H.noalias() += p.gain * steering(M_r, p.phi, d_over_lambda) *
                   steering(M_t, p.theta, d_over_lambda).adjoint();
  }
  return H;
}

TargetScene random_target_scene(Rng& rng, const ScenePrior& prior) {
  if (prior.num_paths < 1) {
    throw std::invalid_argument("ScenePrior.num_paths must be at least 1");
  }
  const double span = prior.max_angle_deg * std::numbers::pi / 180.0;
  TargetScene scene;
  scene.paths.resize(static_cast<std::size_t>(prior.num_paths));
  for (TargetPath& p : scene.paths) {
    p.phi = (2.0 * rng.uniform() - 1.0) * span;
    p.theta = (2.0 * rng.uniform() - 1.0) * span;
    p.gain = rng.cgaussian(1.0);
  }
  return scene;
}

CMat gen_comm_channel(Rng& rng, int M_r, int N_t) {
  CMat H(M_r, N_t);
  for (Index j = 0; j < N_t; ++j) {
    for (Index i = 0; i < M_r; ++i) {
      H(i, j) = rng.cgaussian(1.0);
    }
  }
  return H;
}

CMat gen_orthogonal_waveform(int M_t, int L, double P_r) {
  if (L <= M_t) {
    throw std::invalid_argument(
        "gen_orthogonal_waveform: need L > M_t for orthogonal rows");
  }
  const double amp = std::sqrt(P_r / M_t);
  const double step = -2.0 * std::numbers::pi / L;
  CMat X(M_t, L);
  for (int m = 0; m < M_t; ++m) {
    for (int l = 0; l < L; ++l) {
      X(m, l) = amp * std::polar(1.0, step * m * l);
    }
  }
  return X;
}

CMat gen_symbols(Rng& rng, const Constellation& constel, int N_t, int L) {
  CMat X(N_t, L);
  const auto n = static_cast<std::uint32_t>(constel.size());
  for (Index l = 0; l < L; ++l) {
    for (Index i = 0; i < N_t; ++i) {
      X(i, l) = constel.points[rng.uniform_int(n)];
    }
  }
  return X;
}

CMat gen_noise(Rng& rng, int M_r, int L, double sigma2) {
  CMat N(M_r, L);
  for (Index l = 0; l < L; ++l) {
    for (Index i = 0; i < M_r; ++i) {
      N(i, l) = rng.cgaussian(sigma2);
    }
  }
  return N;
}

CMat synthesize_block(const Scene& scene, const CMat& X_c, Rng& rng,
                      double sigma2) {
  CMat Y = scene.H_r * scene.X_r + scene.H_c * X_c;
  if (sigma2 > 0.0) {
    Y += gen_noise(rng, static_cast<int>(Y.rows()), static_cast<int>(Y.cols()),
                   sigma2);
  }
  if (!linalg::all_finite(Y)) {
    throw std::runtime_error("synthesize_block: non-finite entries in block");
  }
  return Y;
}

StackedModel stack_model(const Scene& scene, const CMat& Y) {
  StackedModel m;
  m.M_r = static_cast<int>(scene.H_c.rows());
  m.N_t = static_cast<int>(scene.H_c.cols());
  m.M_t = static_cast<int>(scene.X_r.rows());
  m.L = static_cast<int>(scene.X_r.cols());
  if (Y.rows() != m.M_r || Y.cols() != m.L) {
    throw std::invalid_argument("stack_model: block has wrong dimensions");
  }
  if (!linalg::all_finite(scene.H_c) || !linalg::all_finite(scene.H_r) ||
      !linalg::all_finite(scene.X_r) || !linalg::all_finite(Y)) {
    throw std::invalid_argument("stack_model: non-finite inputs");
  }

  const CMat Xrt = scene.X_r.transpose();  // L x M_t
  if (linalg::numerical_rank(Xrt) < m.M_t) {
    throw std::runtime_error("stack_model: X_r is rank deficient");
  }

  const CMat I_mr = CMat::Identity(m.M_r, m.M_r);
  m.H_c = scene.H_c;
  m.y = linalg::vec(Y);
  m.A_r = linalg::kron(Xrt, I_mr);
  m.A_c = linalg::kron(CMat::Identity(m.L, m.L), scene.H_c);

  // The stacked operators factor over snapshots: A_r^H A_r, Gamma and G all
  // inherit a Kronecker structure from A_r = X_r^T kron I and
  // A_c = I kron H_c. Building them from the small factors is exact and
  // keeps large blocks cheap; the full-size constructions are recomputed
  // independently in the tests and the verification suite.
  m.P_perp = linalg::orth_complement_projector(Xrt, "X_r^T");
  const CMat S = Xrt.adjoint() * Xrt;  // M_t x M_t Gram factor
  const CMat S_inv = S.llt().solve(CMat::Identity(m.M_t, m.M_t));
  m.Xi = linalg::kron(S_inv, I_mr);
  m.Gamma = linalg::kron(m.P_perp, I_mr);
  m.G = linalg::kron(m.P_perp, scene.H_c);
  m.y_tilde = m.Gamma * m.y;
  return m;
}

}  // namespace dfrc
