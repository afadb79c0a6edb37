#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dfrc/analysis.hpp"
#include "dfrc/harness.hpp"

using namespace dfrc;

namespace {

// Independent water-filling oracle: bisect the water level until the budget
// is met, then threshold. Shares no code with the production allocator.
RVec waterfill_by_bisection(const RVec& lambda, double snr, double total) {
  double lo = 0.0, hi = total + 1.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > 0.0) hi = std::max(hi, total + 1.0 / (snr * lambda(i)));
  }
  auto spent = [&](double mu) {
    double s = 0.0;
    for (Index i = 0; i < lambda.size(); ++i) {
      if (lambda(i) > 0.0) s += std::max(0.0, mu - 1.0 / (snr * lambda(i)));
    }
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spent(mid) > total ? hi : lo) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  RVec p(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    p(i) = lambda(i) > 0.0 ? std::max(0.0, mu - 1.0 / (snr * lambda(i))) : 0.0;
  }
  return p;
}

}  // namespace

TEST_CASE("projected SNR and closed-form SINR at the default operating "
          "point") {
  const SystemConfig sys;
  const ScenePrior prior;
  CHECK(snr_projected_theory(sys) == 100.0);
  // M_r P_c / (paths P_r / M_t + M_r sigma2) with 3 paths of unit mean power
  const double want = 8.0 / (3.0 * sys.P_r / 4.0 + 0.08);
  CHECK(sinr_sic_closed_form(sys, prior) == doctest::Approx(want).epsilon(1e-12));
  CHECK(sinr_sic_closed_form(sys, prior) < 95.0);
}

TEST_CASE("empirical SINR honors the closed form") {
  const SystemConfig sys;
  const ScenePrior prior;
  Rng rng(500);
  const double emp = sinr_sic_empirical(sys, prior, 800, rng);
  const double want = sinr_sic_closed_form(sys, prior);
  CHECK(std::abs(emp / want - 1.0) < 0.15);
  CHECK(emp < snr_projected_theory(sys));
}

TEST_CASE("estimation bound reproduces the frozen default-point value") {
  const SystemConfig sys;
  const CMat x_r = gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  const CMat r = x_r * x_r.adjoint() / double(sys.L);
  const double bound = crb_target_response(r, sys.sigma2, sys.M_r, sys.L);
  CHECK(bound == doctest::Approx(0.4038127004673237).epsilon(1e-12));
}

TEST_CASE("estimation bound via an independent eigenvalue route") {
  // sigma^2 M_r / L * tr(R^-1) = sigma^2 M_r / L * sum(1/eig(R))
  Rng rng(501);
  CMat a(4, 7);
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index rr = 0; rr < a.rows(); ++rr) a(rr, c) = rng.cgaussian(1.0);
  }
  const CMat r = a * a.adjoint() / 7.0;
  const double bound = crb_target_response(r, 0.02, 6, 10);
  const linalg::HermitianEig eig = linalg::hermitian_eig(r);
  double tr_inv = 0.0;
  for (Index i = 0; i < eig.values.size(); ++i) tr_inv += 1.0 / eig.values(i);
  CHECK(bound == doctest::Approx(0.02 * 6.0 / 10.0 * tr_inv).epsilon(1e-10));
}

TEST_CASE("estimation bound rejects singular waveform covariance") {
  CMat r = CMat::Zero(3, 3);
  r(0, 0) = 1.0;
  CHECK_THROWS_AS((void)crb_target_response(r, 0.01, 4, 8),
                  std::runtime_error);
}

TEST_CASE("water-filling matches an independent bisection oracle") {
  Rng rng(502);
  for (int t = 0; t < 40; ++t) {
    const Index n = 1 + t % 6;
    RVec lambda(n);
    for (Index i = 0; i < n; ++i) lambda(i) = std::norm(rng.cgaussian(1.0));
    if (t % 7 == 0) lambda(0) = 0.0;
    const double snr = (t % 2 == 0) ? 80.0 : 0.3;
    const double total = (t % 3 == 0) ? 0.05 : 1.0;
    const RVec got = waterfill(lambda, snr, total);
    const RVec want = waterfill_by_bisection(lambda, snr, total);
    CHECK((got - want).norm() <= 1e-9 * (1.0 + want.norm()));
    CHECK(waterfill_kkt_residual(lambda, snr, total, got) <= 1e-9);
  }
}

TEST_CASE("water-filling floods a single mode when power is scarce") {
  RVec lambda(3);
  lambda << 4.0, 1.0, 0.25;
  // tiny budget: only the strongest mode comes online
  const RVec p = waterfill(lambda, 1.0, 0.1);
  CHECK(p(0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(p(1) == 0.0);
  CHECK(p(2) == 0.0);
  // equal gains: budget splits evenly
  RVec flat = RVec::Constant(4, 2.0);
  const RVec q = waterfill(flat, 10.0, 1.0);
  for (Index i = 0; i < 4; ++i) {
    CHECK(q(i) == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("water-filling validates its arguments") {
  RVec lambda = RVec::Ones(2);
  CHECK_THROWS_AS((void)waterfill(lambda, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)waterfill(lambda, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("perturbed allocations fail the optimality residual") {
  RVec lambda(4);
  lambda << 3.0, 2.0, 1.0, 0.5;
  const RVec p = waterfill(lambda, 50.0, 1.0);
  CHECK(waterfill_kkt_residual(lambda, 50.0, 1.0, p) <= 1e-9);
  RVec bad = p;
  bad(0) += 1e-3;
  bad(1) -= 1e-3;  // budget intact, levels broken
  CHECK(waterfill_kkt_residual(lambda, 50.0, 1.0, bad) > 1e-4);
}

TEST_CASE("rate report carries the exact snapshot fraction") {
  Rng rng(503);
  const SystemConfig sys;
  CMat h(sys.M_r, sys.N_t);
  for (Index c = 0; c < h.cols(); ++c) {
    for (Index r = 0; r < h.rows(); ++r) h(r, c) = rng.cgaussian(1.0);
  }
  const double sinr = sinr_sic_closed_form(sys, ScenePrior{});
  const RateReport rep = ergodic_rates(h, sys, sinr);
  CHECK(rep.rate_comm_only > 0.0);
  // exact equality: same eigenvalues, same allocations, scaled afterwards
  CHECK(rep.rate_projection == 0.8 * rep.rate_comm_only);
  CHECK(rep.rate_sic < rep.rate_comm_only);
  CHECK(rep.rate_sic > 0.0);
  // eigenvalues descending, allocations within budget
  for (Index i = 1; i < rep.eigenvalues.size(); ++i) {
    CHECK(rep.eigenvalues(i - 1) >= rep.eigenvalues(i));
  }
  CHECK(rep.powers.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("projection rate recomputed from the reduced matrix spectrum") {
  Rng rng(504);
  SystemConfig sys;
  sys.N_t = 4;  // smaller instance keeps the spectrum route cheap
  Scene sc;
  sc.H_c = gen_comm_channel(rng, sys.M_r, sys.N_t);
  sc.target = random_target_scene(rng, ScenePrior{});
  sc.H_r = build_target_response(sc.target, sys.M_r, sys.M_t,
                                 sys.d_over_lambda);
  sc.X_r = gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  sc.R = sc.X_r * sc.X_r.adjoint() / double(sys.L);
  const CMat x_c = gen_symbols(rng, sys.make_constellation(), sys.N_t, sys.L);
  const CMat y = synthesize_block(sc, x_c, rng, sys.sigma2);
  const StackedModel m = stack_model(sc, y);

  const double sinr = sinr_sic_closed_form(sys, ScenePrior{});
  const RateReport rep = ergodic_rates(sc.H_c, sys, sinr);
  const double via_spectrum =
      rate_projection_via_projected_spectrum(sc.H_c, m.G, sys);
  CHECK(std::abs(via_spectrum - rep.rate_projection) <=
        1e-6 * rep.rate_projection);
}

TEST_CASE("bit and block error rates on frozen examples") {
  const Constellation c = Constellation::qpsk(1.0);
  const Index n = 16;
  Eigen::VectorXi idx(n);
  for (Index i = 0; i < n; ++i) idx(i) = int(i % 4);
  const CVec x_true = indices_to_symbols(idx, c);

  // one flipped real sign: exactly one wrong bit out of 32
  Eigen::VectorXi one = idx;
  one(5) = one(5) ^ 2;
  CHECK(ber(x_true, indices_to_symbols(one, c), c) ==
        doctest::Approx(1.0 / 32.0).epsilon(1e-15));

  // antipodal everywhere: every bit wrong
  Eigen::VectorXi flipped = idx;
  for (Index i = 0; i < n; ++i) flipped(i) = idx(i) ^ 3;
  CHECK(ber(x_true, indices_to_symbols(flipped, c), c) == 1.0);

  // block error rate with 4-symbol blocks: one bad symbol taints one block
  CHECK(bler(x_true, indices_to_symbols(one, c), c, 4) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(bler(x_true, x_true, c, 4) == 0.0);
}

TEST_CASE("constellation bit labels are Gray over sign flips") {
  const Constellation c = Constellation::qpsk(1.0);
  CHECK(c.bit_distance(0, 1) == 1);  // imaginary sign flip
  CHECK(c.bit_distance(0, 2) == 1);  // real sign flip
  CHECK(c.bit_distance(0, 3) == 2);  // both
  CHECK(c.bit_distance(1, 2) == 2);
  CHECK(c.index_of(c.points[3]) == 3);
  CHECK(c.index_of(cplx(10.0, -10.0)) == 1);  // nearest-point decision
}

TEST_CASE("nmse normalizes by the reference energy and guards zero") {
  CVec h(2), g(2);
  h << cplx(1.0, 0.0), cplx(0.0, 1.0);
  g << cplx(1.0, 0.0), cplx(0.0, 0.0);
  CHECK(nmse(h, g) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(nmse(h, h) == 0.0);
  CHECK_THROWS_AS((void)nmse(CVec::Zero(2), g), std::invalid_argument);
}
