#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dfrc/analysis.hpp"
#include "dfrc/receivers.hpp"

using namespace dfrc;

namespace {

CMat random_cmat(Rng& rng, Index rows, Index cols) {
  CMat m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.cgaussian(1.0);
  }
  return m;
}

// Reference detector: plain depth-first enumeration, no tabulation tricks.
// Deliberately naive so it shares nothing with the production routine.
void naive_scan(const CMat& h, const CVec& y, const Constellation& constel,
                Index pos, CVec& x, Eigen::VectorXi& idx, double& best,
                Eigen::VectorXi& best_idx) {
  if (pos == h.cols()) {
    const double f = (y - h * x).squaredNorm();
    if (f < best - 1e-12) {
      best = f;
      best_idx = idx;
    }
    return;
  }
  for (int p = 0; p < int(constel.points.size()); ++p) {
    idx(pos) = p;
    x(pos) = constel.points[std::size_t(p)];
    naive_scan(h, y, constel, pos + 1, x, idx, best, best_idx);
  }
}

Eigen::VectorXi naive_detect(const CMat& h, const CVec& y,
                             const Constellation& constel) {
  CVec x(h.cols());
  Eigen::VectorXi idx(h.cols()), best_idx(h.cols());
  double best = std::numeric_limits<double>::infinity();
  naive_scan(h, y, constel, 0, x, idx, best, best_idx);
  return best_idx;
}

struct SmallProblem {
  Scene scene;
  CMat X_c;
  StackedModel model;
  Constellation constel;
};

SmallProblem make_problem(const SystemConfig& sys, std::uint64_t seed) {
  SmallProblem p{.scene = {}, .X_c = {}, .model = {},
                 .constel = sys.make_constellation()};
  Rng rng(seed);
  p.scene.H_c = gen_comm_channel(rng, sys.M_r, sys.N_t);
  p.scene.target = random_target_scene(rng, ScenePrior{});
  p.scene.H_r = build_target_response(p.scene.target, sys.M_r, sys.M_t,
                                      sys.d_over_lambda);
  p.scene.X_r = gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  p.scene.R = p.scene.X_r * p.scene.X_r.adjoint() / double(sys.L);
  p.X_c = gen_symbols(rng, p.constel, sys.N_t, sys.L);
  const CMat y = synthesize_block(p.scene, p.X_c, rng, sys.sigma2);
  p.model = stack_model(p.scene, y);
  return p;
}

SystemConfig tiny_system() {
  SystemConfig sys;
  sys.M_t = 1;
  sys.M_r = 2;
  sys.N_t = 2;
  sys.L = 3;
  return sys;
}

}  // namespace

TEST_CASE("within_enum_budget handles large exponents without overflow") {
  CHECK(within_enum_budget(4, 8, 1ull << 16));
  CHECK_FALSE(within_enum_budget(4, 9, 1ull << 16));
  CHECK(within_enum_budget(4, 10, 1ull << 20));
  CHECK_FALSE(within_enum_budget(4, 40, ~0ull >> 1));
  CHECK(within_enum_budget(2, 3, 8));
  CHECK_FALSE(within_enum_budget(2, 4, 8));
}

TEST_CASE("exhaustive_detect equals a naive full scan") {
  Rng rng(300);
  const Constellation constel = Constellation::qpsk(1.0);
  for (int t = 0; t < 30; ++t) {
    const Index n = 1 + t % 5;
    const CMat h = random_cmat(rng, 6, n);
    CVec y(6);
    for (Index i = 0; i < 6; ++i) y(i) = rng.cgaussian(4.0);
    const Eigen::VectorXi got =
        exhaustive_detect(h, y, constel, kJointEnumBudget);
    const Eigen::VectorXi want = naive_detect(h, y, constel);
    CHECK((got.array() == want.array()).all());
  }
}

TEST_CASE("exhaustive_detect breaks exact ties lexicographically") {
  const Constellation constel = Constellation::qpsk(2.0);
  // a zero matrix makes every candidate score identically
  const CMat h = CMat::Zero(3, 2);
  const CVec y = CVec::Ones(3);
  const Eigen::VectorXi got =
      exhaustive_detect(h, y, constel, kJointEnumBudget);
  CHECK(got(0) == 0);
  CHECK(got(1) == 0);
}

TEST_CASE("exhaustive_detect refuses blown budgets") {
  const Constellation constel = Constellation::qpsk(1.0);
  const CMat h = CMat::Ones(2, 9);
  const CVec y = CVec::Ones(2);
  CHECK_THROWS_AS((void)exhaustive_detect(h, y, constel, 1ull << 16),
                  std::invalid_argument);
}

TEST_CASE("projected exhaustive receiver matches the joint oracle") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const SmallProblem p = make_problem(tiny_system(), seed);
    const DetectionResult ml = exhaustive_joint_ml(p.model, p.constel);
    Rng unused(0);
    const DetectionResult proj = run_projection_receiver(
        p.model, p.constel, DetectorStrategy::kExhaustive, unused,
        SdrParams{});
    REQUIRE(ml.x_indices.size() == proj.x_indices.size());
    CHECK((ml.x_indices.array() == proj.x_indices.array()).all());
    CHECK((ml.h_hat - proj.h_hat).norm() <= 1e-9);
  }
}

TEST_CASE("joint oracle objective equals the explicitly minimized residual") {
  const SmallProblem p = make_problem(tiny_system(), 77);
  const DetectionResult ml = exhaustive_joint_ml(p.model, p.constel);
  const double f =
      (p.model.y - p.model.A_c * ml.x_hat - p.model.A_r * ml.h_hat)
          .squaredNorm();
  CHECK(std::abs(ml.objective - f) <= 1e-10 * std::max(f, 1.0));
}

TEST_CASE("projection receiver objective is the reduced-problem residual") {
  const SmallProblem p = make_problem(tiny_system(), 78);
  Rng unused(0);
  const DetectionResult r = run_projection_receiver(
      p.model, p.constel, DetectorStrategy::kExhaustive, unused, SdrParams{});
  const double f = (p.model.y_tilde - p.model.G * r.x_hat).squaredNorm();
  CHECK(std::abs(r.objective - f) <= 1e-10 * std::max(f, 1.0));
}

TEST_CASE("projected detection does not depend on the radar power") {
  // the projector wipes the radar component entirely, so scaling P_r moves
  // nothing but the annihilated subspace
  SystemConfig weak = tiny_system();
  SystemConfig strong = tiny_system();
  strong.P_r = weak.P_r * 1000.0;
  // same seed: identical H_c, target angles, symbols, and noise draws
  const SmallProblem a = make_problem(weak, 91);
  const SmallProblem b = make_problem(strong, 91);
  Rng ua(0), ub(0);
  const DetectionResult ra = run_projection_receiver(
      a.model, a.constel, DetectorStrategy::kExhaustive, ua, SdrParams{});
  const DetectionResult rb = run_projection_receiver(
      b.model, b.constel, DetectorStrategy::kExhaustive, ub, SdrParams{});
  CHECK((ra.x_indices.array() == rb.x_indices.array()).all());
}

TEST_CASE("a numerically dead reduced matrix is flagged, not solved") {
  const Constellation constel = Constellation::qpsk(1.0);
  const CMat g = CMat::Zero(6, 3);
  const CVec y = CVec::Ones(6);
  bool flag = false;
  Rng rng(1);
  const Eigen::VectorXi idx = detect_projected(
      y, g, constel, DetectorStrategy::kExhaustive, rng, SdrParams{}, &flag);
  CHECK(flag);
  CHECK((idx.array() == 0).all());
}

TEST_CASE("SIC with snapshot enumeration equals per-snapshot naive scans") {
  SystemConfig sys = tiny_system();
  const SmallProblem p = make_problem(sys, 55);
  Rng rng(2);
  const DetectionResult sic = detect_sic(p.model, p.constel, rng, SdrParams{});
  const CMat y_blk = linalg::unvec(p.model.y, sys.M_r, sys.L);
  for (int l = 0; l < sys.L; ++l) {
    const Eigen::VectorXi want =
        naive_detect(p.scene.H_c, y_blk.col(l), p.constel);
    for (int u = 0; u < sys.N_t; ++u) {
      CHECK(sic.x_indices(l * sys.N_t + u) == want(u));
    }
  }
  // stage-2 estimate is the least-squares solve at the detected symbols
  CHECK((sic.h_hat - ls_target_estimate(p.model, sic.x_hat)).norm() <= 1e-12);
}

TEST_CASE("linear SIC stage matches the direct filter formula") {
  SystemConfig sys;
  sys.M_t = 1;
  sys.M_r = 4;
  sys.N_t = 2;
  sys.L = 5;
  sys.sigma2 = 0.02;
  const SmallProblem p = make_problem(sys, 71);
  const double floor =
      3.0 * sys.P_r / (double(sys.M_t) * sys.M_r) + sys.sigma2;
  Rng rng(3);
  const DetectionResult sic = detect_sic(p.model, p.constel, rng, SdrParams{},
                                         SicStage1::kMmse, floor);

  // reference filter written out directly, no shared code path
  const double es = sys.P_c / sys.N_t;
  const CMat h = p.scene.H_c;
  const CMat k =
      es * (h * h.adjoint()) + floor * CMat::Identity(sys.M_r, sys.M_r);
  const CMat w = es * h.adjoint() * k.inverse();
  const CMat y_blk = linalg::unvec(p.model.y, sys.M_r, sys.L);
  for (int l = 0; l < sys.L; ++l) {
    const CVec soft = w * y_blk.col(l);
    for (int u = 0; u < sys.N_t; ++u) {
      CHECK(sic.x_indices(l * sys.N_t + u) == p.constel.index_of(soft(u)));
    }
  }
  CHECK((sic.h_hat - ls_target_estimate(p.model, sic.x_hat)).norm() <= 1e-12);
}

TEST_CASE("linear SIC stage recovers symbols when interference is faint") {
  SystemConfig sys = tiny_system();
  sys.M_r = 4;
  sys.P_r = 1e-8;
  sys.sigma2 = 1e-10;
  const SmallProblem p = make_problem(sys, 72);
  Rng rng(4);
  const DetectionResult sic = detect_sic(p.model, p.constel, rng, SdrParams{},
                                         SicStage1::kMmse, 1e-8);
  for (int i = 0; i < sys.L * sys.N_t; ++i) {
    CHECK(sic.x_indices(i) ==
          p.constel.index_of(linalg::vec(p.X_c)(i)));
  }
}

TEST_CASE("linear SIC stage rejects a non-positive noise floor") {
  const SmallProblem p = make_problem(tiny_system(), 73);
  Rng rng(5);
  CHECK_THROWS_AS((void)detect_sic(p.model, p.constel, rng, SdrParams{},
                                   SicStage1::kMmse, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)detect_sic(p.model, p.constel, rng, SdrParams{},
                                   SicStage1::kMmse, -1.0),
                  std::invalid_argument);
}

TEST_CASE("ls_target_estimate is exact in the noiseless genie case") {
  SystemConfig sys = tiny_system();
  sys.sigma2 = 0.0;
  const SmallProblem p = make_problem(sys, 60);
  const CVec h = ls_target_estimate(p.model, linalg::vec(p.X_c));
  CHECK((h - linalg::vec(p.scene.H_r)).norm() <=
        1e-9 * p.scene.H_r.norm());
}

TEST_CASE("SDR detector agrees with enumeration on well-posed instances") {
  Rng rng(400);
  const Constellation constel = Constellation::qpsk(1.0);
  int agree = 0;
  const int total = 60;
  for (int t = 0; t < total; ++t) {
    const Index n = 2 + t % 3;
    const CMat h = random_cmat(rng, 8, n);
    const CVec x_true = indices_to_symbols(
        [&] {
          Eigen::VectorXi idx(n);
          for (Index i = 0; i < n; ++i) idx(i) = rng.uniform_int(4);
          return idx;
        }(),
        constel);
    CVec y = h * x_true;
    for (Index i = 0; i < y.size(); ++i) y(i) += rng.cgaussian(0.01);
    Rng det(derive_seed(400, 1, std::uint64_t(t)));
    const Eigen::VectorXi si = detect_qpsk_sdr(h, y, constel, det, SdrParams{});
    const Eigen::VectorXi ei = exhaustive_detect(h, y, constel, 1ull << 20);
    if ((si.array() == ei.array()).all()) ++agree;
  }
  CHECK(agree >= (total * 9) / 10);
}

TEST_CASE("SDR rounding never loses to the unconstrained sign candidate") {
  Rng rng(401);
  for (int t = 0; t < 20; ++t) {
    const Index n = 6;
    RMat h(10, n);
    RVec b(10);
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < 10; ++r) h(r, c) = rng.gaussian();
    }
    for (Index r = 0; r < 10; ++r) b(r) = 2.0 * rng.gaussian();
    Rng det(derive_seed(401, 1, std::uint64_t(t)));
    const RVec s = sdr_relax_and_round(h, b, det, SdrParams{});
    // reference candidate: signs of the least-squares solution
    const RVec x_ls = (h.transpose() * h)
                          .ldlt()
                          .solve(h.transpose() * b);
    RVec s_ls(n);
    for (Index i = 0; i < n; ++i) s_ls(i) = x_ls(i) < 0.0 ? -1.0 : 1.0;
    const double f_got = (b - h * s).squaredNorm();
    const double f_ref = (b - h * s_ls).squaredNorm();
    CHECK(f_got <= f_ref + 1e-9);
  }
}

TEST_CASE("SDR detection is deterministic given the generator state") {
  Rng rng(402);
  const Constellation constel = Constellation::qpsk(1.0);
  const CMat h = random_cmat(rng, 8, 4);
  CVec y(8);
  for (Index i = 0; i < 8; ++i) y(i) = rng.cgaussian(2.0);
  Rng d1(5150), d2(5150);
  const Eigen::VectorXi a = detect_qpsk_sdr(h, y, constel, d1, SdrParams{});
  const Eigen::VectorXi b = detect_qpsk_sdr(h, y, constel, d2, SdrParams{});
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("SDR front end rejects non-QPSK alphabets") {
  Constellation c = Constellation::qpsk(1.0);
  c.name = "8psk";
  Rng rng(1);
  CHECK_THROWS_AS((void)detect_qpsk_sdr(CMat::Identity(2, 2), CVec::Ones(2),
                                        c, rng, SdrParams{}),
                  std::invalid_argument);
}

TEST_CASE("joint oracle refuses oversized alphabets") {
  SystemConfig sys;  // defaults: 4^(20*8) candidates, far beyond any budget
  const SmallProblem p = make_problem(sys, 3);
  CHECK_THROWS_AS((void)exhaustive_joint_ml(p.model, p.constel),
                  std::invalid_argument);
}
