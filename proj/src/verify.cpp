#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfrc/analysis.hpp"
#include "dfrc/harness.hpp"
#include "dfrc/receivers.hpp"

namespace dfrc {

namespace {

Scene make_scene(const SystemConfig& sys, const ScenePrior& prior, Rng& rng) {
  Scene sc;
  sc.H_c = gen_comm_channel(rng, sys.M_r, sys.N_t);
  sc.target = random_target_scene(rng, prior);
  sc.H_r = build_target_response(sc.target, sys.M_r, sys.M_t,
                                 sys.d_over_lambda);
  sc.X_r = gen_orthogonal_waveform(sys.M_t, sys.L, sys.P_r);
  sc.R = sc.X_r * sc.X_r.adjoint() / double(sys.L);
  return sc;
}

struct DrawnModel {
  Scene scene;
  CMat X_c;
  CMat noise;
  StackedModel model;
};

DrawnModel draw_model(const SystemConfig& sys, const ScenePrior& prior,
                      Rng& rng) {
  DrawnModel d;
  d.scene = make_scene(sys, prior, rng);
  const Constellation constel = sys.make_constellation();
  d.X_c = gen_symbols(rng, constel, sys.N_t, sys.L);
  d.noise = gen_noise(rng, sys.M_r, sys.L, sys.sigma2);
  const CMat Y = d.scene.H_r * d.scene.X_r + d.scene.H_c * d.X_c + d.noise;
  d.model = stack_model(d.scene, Y);
  return d;
}

SystemConfig tiny_config(int i) {
  SystemConfig sys;
  sys.M_t = 1;
  sys.M_r = 2;
  sys.N_t = 1 + i % 2;
  sys.L = 2 + i % 3;
  sys.sigma2 = (i % 2 == 0) ? 0.1 : 0.01;
  return sys;
}

}  // namespace

double joint_ml_reduction_residual(const StackedModel& model,
                                   const Constellation& constel) {
  const DetectionResult ml = exhaustive_joint_ml(model, constel);
  Rng unused(0);
  const DetectionResult proj = run_projection_receiver(
      model, constel, DetectorStrategy::kExhaustive, unused, SdrParams{});
  if (ml.x_indices.size() != proj.x_indices.size() ||
      (ml.x_indices.array() != proj.x_indices.array()).any()) {
    return 1e9;
  }
  return (ml.h_hat - proj.h_hat).norm();
}

double waterfill_kkt_residual(const RVec& eigenvalues, double snr,
                              double total_power, const RVec& alloc) {
  if (eigenvalues.size() != alloc.size()) {
    throw std::invalid_argument(
        "waterfill_kkt_residual: eigenvalue/allocation length mismatch");
  }
  double res = 0.0;
  double used = 0.0;
  bool any_gain = false;
  for (Index i = 0; i < alloc.size(); ++i) {
    res = std::max(res, -alloc(i));
    used += std::max(alloc(i), 0.0);
    if (eigenvalues(i) > 0.0) any_gain = true;
  }
  if (total_power <= 0.0 || !any_gain) {
    return std::max(res, used);
  }
  // At the optimum the budget is exhausted and every active carrier sits at
  // one common water level mu = p_i + 1/(snr*lambda_i); inactive carriers
  // with positive gain must already be above the water.
  res = std::max(res, std::abs(used - total_power) / total_power);
  const double active_tol = 1e-12 * (total_power + 1.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < alloc.size(); ++i) {
    if (alloc(i) <= active_tol) continue;
    if (eigenvalues(i) <= 0.0) {
      res = std::max(res, alloc(i));  // power spent on a dead carrier
      continue;
    }
    const double level = alloc(i) + 1.0 / (snr * eigenvalues(i));
    lo = std::min(lo, level);
    hi = std::max(hi, level);
  }
  if (hi > 0.0) {
    res = std::max(res, (hi - lo) / hi);
    const double mu = 0.5 * (lo + hi);
    for (Index i = 0; i < alloc.size(); ++i) {
      if (alloc(i) > active_tol || eigenvalues(i) <= 0.0) continue;
      const double floor = 1.0 / (snr * eigenvalues(i));
      res = std::max(res, std::max(0.0, mu - floor) / mu);
    }
  }
  return res;
}

bool all_pass(const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto add = [&](const char* name, double tol, double res) {
    out.push_back({name, tol, res, res <= tol});
  };
  const SystemConfig defaults;
  const ScenePrior prior;

  {
    // Brute-force joint minimization and the projected receiver must agree
    // symbol for symbol, with matching target estimates, on instances small
    // enough to enumerate.
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const SystemConfig sys = tiny_config(i);
      Rng rng(derive_seed(seed, 10, static_cast<std::uint64_t>(i)));
      const DrawnModel d = draw_model(sys, prior, rng);
      worst = std::max(
          worst, joint_ml_reduction_residual(d.model, sys.make_constellation()));
    }
    add("joint_ml_reduction_equivalence", 1e-9, worst);
  }

  {
    // ||b - A x||^2 = ||A (x - x_ls)||^2 + b^H (I - A (A^H A)^-1 A^H) b
    // for any x when A has full column rank.
    double worst = 0.0;
    Rng rng(derive_seed(seed, 11, 0));
    for (int i = 0; i < 100; ++i) {
      CMat A(12, 3);
      for (Index r = 0; r < A.rows(); ++r) {
        for (Index c = 0; c < A.cols(); ++c) A(r, c) = rng.cgaussian(1.0);
      }
      CVec b(12), x(3);
      for (Index r = 0; r < b.size(); ++r) b(r) = rng.cgaussian(1.0);
      for (Index r = 0; r < x.size(); ++r) x(r) = rng.cgaussian(1.0);
      const double direct = (b - A * x).squaredNorm();
      const CVec x_ls = linalg::ls_solve(A, b);
      const CMat P = linalg::orth_complement_projector(A);
      const double split =
          (A * (x - x_ls)).squaredNorm() + (b.adjoint() * (P * b))(0).real();
      worst = std::max(worst, std::abs(direct - split) /
                                  std::max(direct, 1e-300));
    }
    add("ls_residual_decomposition", 1e-9, worst);
  }

  {
    // On default-size scenes: the reduction operator annihilates the radar
    // columns, matches the generic full-size construction, keeps the
    // expected rank, and its snapshot factor has a flat 0/1 spectrum.
    double annihilate = 0.0, structure = 0.0, rank_err = 0.0, spectrum = 0.0;
    for (int i = 0; i < 10; ++i) {
      Rng rng(derive_seed(seed, 12, static_cast<std::uint64_t>(i)));
      const DrawnModel d = draw_model(defaults, prior, rng);
      const StackedModel& m = d.model;

      annihilate = std::max(
          annihilate, (m.Gamma * m.A_r).norm() / m.A_r.norm());

      const CMat Gamma_gen = linalg::orth_complement_projector(m.A_r);
      const CMat G_gen = Gamma_gen * m.A_c;
      structure = std::max(
          structure, (m.Gamma - Gamma_gen).norm() / Gamma_gen.norm());
      structure = std::max(structure, (m.G - G_gen).norm() / G_gen.norm());

      const Index want =
          static_cast<Index>(defaults.L - defaults.M_t) * defaults.N_t;
      rank_err = std::max(
          rank_err,
          std::abs(double(linalg::numerical_rank(m.G) - want)));

      const linalg::HermitianEig eig = linalg::hermitian_eig(m.P_perp);
      for (Index j = 0; j < eig.values.size(); ++j) {
        const double want_ev =
            j < static_cast<Index>(defaults.L - defaults.M_t) ? 1.0 : 0.0;
        spectrum = std::max(spectrum, std::abs(eig.values(j) - want_ev));
      }
    }
    add("projector_annihilates_radar", 1e-10, annihilate);
    add("projected_matrix_structure", 1e-10, structure);
    add("projected_matrix_rank", 0.5, rank_err);
    add("snapshot_projector_eigenvalues", 1e-9, spectrum);
  }

  {
    // The reduction must not cost post-combining communication SNR: the
    // empirical ratio ||G x||^2 / ||Gamma n||^2 stays at P_c/sigma^2.
    double num = 0.0, den = 0.0;
    Rng rng(derive_seed(seed, 13, 0));
    for (int i = 0; i < 400; ++i) {
      const DrawnModel d = draw_model(defaults, prior, rng);
      num += (d.model.G * linalg::vec(d.X_c)).squaredNorm();
      den += (d.model.Gamma * linalg::vec(d.noise)).squaredNorm();
    }
    const double emp = num / den;
    add("projected_snr_preserved", 0.1,
        std::abs(emp / snr_projected_theory(defaults) - 1.0));

    Rng rng2(derive_seed(seed, 14, 0));
    const double sinr = sinr_sic_empirical(defaults, prior, 400, rng2);
    add("sic_sinr_below_projected_snr", 1.0,
        sinr / snr_projected_theory(defaults));
  }

  {
    // With the transmitted symbols handed to the least-squares stage, the
    // mean total squared estimation error equals the bound sigma^2 M_r /
    // L * tr(R^-1).
    double tse_sum = 0.0;
    Rng rng(derive_seed(seed, 15, 0));
    const int trials = 2000;
    for (int i = 0; i < trials; ++i) {
      const DrawnModel d = draw_model(defaults, prior, rng);
      const CVec h = ls_target_estimate(d.model, linalg::vec(d.X_c));
      tse_sum += (h - linalg::vec(d.scene.H_r)).squaredNorm();
    }
    const CMat X_r =
        gen_orthogonal_waveform(defaults.M_t, defaults.L, defaults.P_r);
    const CMat R = X_r * X_r.adjoint() / double(defaults.L);
    const double bound =
        crb_target_response(R, defaults.sigma2, defaults.M_r, defaults.L);
    add("genie_ls_matches_crb", 0.1, std::abs(tse_sum / trials / bound - 1.0));
  }

  {
    // Rate bookkeeping: the projection rate is the (1 - M_t/L) snapshot
    // fraction of the interference-free rate, independently confirmed by
    // water-filling over the spectrum of G^H G, and treating the radar
    // return as noise can only reduce the rate.
    double fraction = 0.0, spectrum_route = 0.0, ordering = 0.0;
    const double sinr = sinr_sic_closed_form(defaults, prior);
    for (int i = 0; i < 5; ++i) {
      Rng rng(derive_seed(seed, 16, static_cast<std::uint64_t>(i)));
      const DrawnModel d = draw_model(defaults, prior, rng);
      const RateReport rep = ergodic_rates(d.scene.H_c, defaults, sinr);
      const double want = 1.0 - double(defaults.M_t) / double(defaults.L);
      fraction = std::max(
          fraction, std::abs(rep.rate_projection / rep.rate_comm_only - want));
      const double via_spectrum = rate_projection_via_projected_spectrum(
          d.scene.H_c, d.model.G, defaults);
      spectrum_route = std::max(
          spectrum_route, std::abs(via_spectrum - rep.rate_projection) /
                              rep.rate_comm_only);
      ordering = std::max(ordering, rep.rate_sic - rep.rate_comm_only);
    }
    add("rate_snapshot_fraction", 1e-12, fraction);
    add("rate_projected_spectrum_route", 1e-6, spectrum_route);
    add("rate_sic_not_above_comm", 1e-12, ordering);
  }

  {
    // Water-filling output must satisfy its optimality conditions, also on
    // spectra with dead carriers and under scarce or abundant power.
    double worst = 0.0;
    Rng rng(derive_seed(seed, 17, 0));
    for (int i = 0; i < 20; ++i) {
      const Index n = 4;
      RVec lambda(n);
      for (Index j = 0; j < n; ++j) lambda(j) = std::norm(rng.cgaussian(1.0));
      if (i % 5 == 0) lambda(n - 1) = 0.0;
      const double snr = (i % 2 == 0) ? 100.0 : 0.5;
      const double total = (i % 3 == 0) ? 0.1 : 1.0;
      const RVec p = waterfill(lambda, snr, total);
      worst = std::max(worst, waterfill_kkt_residual(lambda, snr, total, p));
    }
    add("waterfill_kkt", 1e-9, worst);
  }

  return out;
}

}  // namespace dfrc
