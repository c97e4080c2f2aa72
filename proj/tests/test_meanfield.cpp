#include <doctest.h>

#include <cmath>

#include "delayfield/bifurcation.hpp"
#include "delayfield/errors.hpp"
#include "delayfield/meanfield.hpp"

using namespace delayfield;

namespace {

ModelConfig fig1_config(double lambda, double tau) {
  return single_population_config(1.0, lambda, 0.0, -2.0, 0.5, 1.0, DelayLaw::dirac(tau));
}

double sup_diff_mu(const MomentTrajectory& coarse, const MomentTrajectory& fine) {
  const int ratio = static_cast<int>(std::lround(coarse.dt() / fine.dt()));
  double worst = 0.0;
  for (int k = 0; k <= coarse.steps(); ++k) {
    const double d = std::abs(coarse.mu(0, coarse.history_len() + k) -
                              fine.mu(0, fine.history_len() + k * ratio));
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

TEST_CASE("stationary_point: closed form and residual") {
  auto c1 = fig1_config(0.5, 1.0);
  const auto s1 = stationary_point(c1);
  CHECK(s1.mu[0] == 0.0);
  CHECK(s1.v[0] == doctest::Approx(0.125).epsilon(1e-15));

  auto c2 = single_population_config(2.0, 0.0, 0.0, -1.0, 0.0, 1.0, DelayLaw::dirac(0.5));
  CHECK(stationary_point(c2).v[0] == 0.0);

  auto c3 = single_population_config(2.0, 1.0, 0.0, -1.0, 0.0, 1.0, DelayLaw::dirac(0.5));
  CHECK(stationary_point(c3).v[0] == doctest::Approx(1.0).epsilon(1e-15));

  auto c4 = single_population_config(1.0, 1.0, 0.3, -1.0, 0.0, 1.0, DelayLaw::dirac(0.5));
  CHECK_THROWS_AS(stationary_point(c4), std::domain_error);
}

TEST_CASE("integrate_moments: zero history stays centered, variance relaxes to lambda^2 theta/2") {
  auto cfg = fig1_config(0.5, 1.0);
  const auto grid = make_grid(1e-3, 20.0, cfg.tau_max());
  const auto traj =
      integrate_moments(cfg, grid, MomentHistory::constant({0.0}, {0.0}));
  for (int k = 0; k < traj.rows(); k += 500) CHECK(traj.mu(0, k) == 0.0);
  const int last = traj.history_len() + traj.steps();
  CHECK(traj.v(0, last) == doctest::Approx(0.125).epsilon(1e-9));
  // exponential approach: halfway point already close
  CHECK(std::abs(traj.v_at(0, 10.0) - 0.125) < 1e-6);
  for (int k = 0; k < traj.rows(); k += 100) CHECK(traj.v(0, k) >= 0.0);
}

TEST_CASE("integrate_moments: Fig 1(b) regime decays to (0, 0.125)") {
  auto cfg = fig1_config(0.5, 1.0);
  const auto grid = make_grid(1e-3, 140.0, cfg.tau_max());
  const auto traj = integrate_moments(cfg, grid, MomentHistory::constant({0.3}, {0.125}));
  const int last = traj.history_len() + traj.steps();
  CHECK(std::abs(traj.mu(0, last)) < 1e-6);
  CHECK(std::abs(traj.v(0, last) - 0.125) < 1e-6);
  CHECK(classify_trajectory(traj, 0, 100.0, 140.0).stationary());
}

TEST_CASE("integrate_moments: Fig 1(c) regime oscillates at the Hopf pulsation") {
  auto cfg = fig1_config(0.5, 1.5);
  const auto grid = make_grid(1e-3, 140.0, cfg.tau_max());
  const auto traj = integrate_moments(cfg, grid, MomentHistory::constant({0.3}, {0.125}));
  const auto cls = classify_trajectory(traj, 0, 90.0, 140.0);
  REQUIRE(cls.oscillatory());
  CHECK(cls.pulsation == doctest::Approx(1.60).epsilon(0.15 / 1.60));
  CHECK(cls.amplitude > 0.1);
}

TEST_CASE("integrate_moments: Fig 1(d) regime (lambda = 1, tau = 1.5) is stationary") {
  // rightmost root -0.0389 + 1.440i: the 0.01 perturbation is ~8e-6 peak-to-peak
  // by t = 200, well under the classification threshold
  auto cfg = fig1_config(1.0, 1.5);
  const auto grid = make_grid(1e-3, 250.0, cfg.tau_max());
  const auto traj = integrate_moments(cfg, grid, MomentHistory::constant({0.01}, {0.5}));
  CHECK(classify_trajectory(traj, 0, 200.0, 250.0).stationary());
}

TEST_CASE("fixed point is preserved to machine precision") {
  auto cfg = fig1_config(0.5, 1.0);
  const auto sp = stationary_point(cfg);
  const auto grid = make_grid(1e-3, 50.0, cfg.tau_max());
  const auto traj = integrate_moments(cfg, grid, MomentHistory::constant(sp.mu, sp.v));
  double worst = 0.0;
  for (int k = 0; k < traj.rows(); ++k) {
    worst = std::max(worst, std::abs(traj.mu(0, k) - sp.mu[0]));
    worst = std::max(worst, std::abs(traj.v(0, k) - sp.v[0]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("step-halving convergence order >= 3.5 on the smooth regime") {
  auto cfg = fig1_config(0.5, 1.0);
  const auto history = MomentHistory::constant({0.3}, {0.125});
  const double T = 30.0;
  const auto t4 = integrate_moments(cfg, make_grid(4e-3, T, cfg.tau_max()), history);
  const auto t2 = integrate_moments(cfg, make_grid(2e-3, T, cfg.tau_max()), history);
  const auto t1 = integrate_moments(cfg, make_grid(1e-3, T, cfg.tau_max()), history);
  const auto t0 = integrate_moments(cfg, make_grid(5e-4, T, cfg.tau_max()), history);
  const double d1 = sup_diff_mu(t4, t2);
  const double d2 = sup_diff_mu(t2, t1);
  const double d3 = sup_diff_mu(t1, t0);
  CHECK(std::log2(d1 / d2) >= 3.5);
  CHECK(std::log2(d2 / d3) >= 3.5);
}

TEST_CASE("variance nonnegativity across random configurations") {
  CounterRng rng(2024, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = 0.5 + 1.5 * rng.uniform();
    const double lambda = 1.5 * rng.uniform();
    const double j = -3.0 + 6.0 * rng.uniform();
    const double sigma = rng.uniform();
    const double g = 0.5 + rng.uniform();
    const double tau = 0.2 + 1.3 * rng.uniform();
    auto cfg = single_population_config(theta, lambda, 0.0, j, sigma, g, DelayLaw::dirac(tau));
    const auto grid = make_grid(2e-3, 10.0, cfg.tau_max());
    const double v0 = 0.5 * rng.uniform();
    const auto traj =
        integrate_moments(cfg, grid, MomentHistory::constant({rng.uniform() - 0.5}, {v0}));
    for (int k = 0; k < traj.rows(); ++k) REQUIRE(traj.v(0, k) >= 0.0);
  }
}

TEST_CASE("divergence guard aborts runaway moments") {
  auto cfg = single_population_config(1.0, 0.5, 1e7, -2.0, 0.5, 1.0, DelayLaw::dirac(1.0));
  const auto grid = make_grid(1e-3, 10.0, cfg.tau_max());
  CHECK_THROWS_AS(integrate_moments(cfg, grid, MomentHistory::constant({0.0}, {0.125})),
                  DivergenceError);
}

TEST_CASE("classify_trajectory: constant, synthetic sine, short window") {
  MomentTrajectory traj(1, 1e-3, 0, 60000);
  SUBCASE("constant is stationary") {
    for (int k = 0; k <= 60000; ++k) traj.set(0, k, 0.42, 0.1);
    traj.set_filled(60000);
    CHECK(classify_trajectory(traj, 0, 1.0, 59.0).stationary());
  }
  SUBCASE("synthetic sine recovers its pulsation within 1%") {
    const double w = 1.5986;
    for (int k = 0; k <= 60000; ++k) traj.set(0, k, 0.2 * std::sin(w * k * 1e-3), 0.1);
    traj.set_filled(60000);
    const auto cls = classify_trajectory(traj, 0, 1.0, 59.0);
    REQUIRE(cls.oscillatory());
    CHECK(cls.pulsation == doctest::Approx(w).epsilon(0.01));
    CHECK(cls.amplitude == doctest::Approx(0.2).epsilon(0.01));
  }
  SUBCASE("window shorter than 3 periods is inconclusive") {
    const double w = 1.5986;
    for (int k = 0; k <= 60000; ++k) traj.set(0, k, 0.2 * std::sin(w * k * 1e-3), 0.1);
    traj.set_filled(60000);
    const auto cls = classify_trajectory(traj, 0, 1.0, 8.0);  // ~1.8 periods
    CHECK(cls.kind == Classification::Kind::Inconclusive);
  }
  SUBCASE("window outside the horizon is rejected") {
    traj.set_filled(60000);
    CHECK_THROWS_AS(classify_trajectory(traj, 0, 10.0, 80.0), std::invalid_argument);
  }
}

TEST_CASE("onset sweep brackets the analytic Hopf point (cross-validation)") {
  // probe protocol: tiny perturbation, long horizon, late window
  const double probe = 4e-5;
  CounterRng rng(99, 3);
  int done = 0;
  while (done < 10) {
    const double theta = 0.75 + 0.7 * rng.uniform();
    const double lambda = 1.2 * rng.uniform();
    const double g = 0.8 + 0.6 * rng.uniform();
    const double j = -(1.8 + 1.4 * rng.uniform());
    auto cfg = single_population_config(theta, lambda, 0.0, j, 0.3, g, DelayLaw::dirac(1.0));
    const double k = effective_slope(cfg);
    const auto hopf = hopf_dirac(theta, k);
    if (!hopf || hopf->tau < 0.35 || hopf->tau > 2.2) continue;
    // require a healthy root-crossing speed so the flip resolves within 0.01
    DispersionContext ctx{theta, k, DelayLaw::dirac(hopf->tau)};
    const std::complex<double> xi(0.0, hopf->omega);
    const std::complex<double> h_xi =
        (dispersion_residual(ctx, xi + 1e-6) - dispersion_residual(ctx, xi - 1e-6)) / 2e-6;
    const std::complex<double> h_tau = k * xi * std::exp(-xi * hopf->tau);
    const double speed = (-h_tau / h_xi).real();
    if (speed < 0.15) continue;
    ++done;

    const double vstar = lambda * lambda * theta / 2.0;
    double last_stat = -1.0, first_osc = -1.0;
    for (double tau = hopf->tau - 0.03; tau <= hopf->tau + 0.035; tau += 0.01) {
      auto swept = cfg;
      swept.delays[0] = DelayLaw::dirac(tau);
      const auto grid = make_grid(1e-3, 200.0, tau);
      const auto traj =
          integrate_moments(swept, grid, MomentHistory::constant({probe}, {vstar}));
      const auto cls = classify_trajectory(traj, 0, 150.0, 200.0);
      if (cls.oscillatory() && first_osc < 0.0) first_osc = tau;
      if (!cls.oscillatory() && first_osc < 0.0) last_stat = tau;
    }
    REQUIRE(first_osc > 0.0);
    // analytic point within one sweep step of the flip bracket
    CHECK(hopf->tau >= last_stat - 0.0101);
    CHECK(hopf->tau <= first_osc + 0.0101);
  }
}
