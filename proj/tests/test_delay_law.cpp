#include <doctest.h>

#include <cmath>
#include <complex>

#include "delayfield/delay_law.hpp"
#include "delayfield/rng.hpp"
#include "support/oracles.hpp"

using namespace delayfield;
using cplx = std::complex<double>;

namespace {

// quadrature-based transform evaluation, the oracle the closed forms must match
cplx laplace_by_quadrature(const DelayLaw& law, cplx xi, int nodes = 96) {
  cplx acc{0.0, 0.0};
  for (const auto& q : law.quadrature(nodes)) acc += q.weight * std::exp(-xi * q.node);
  return acc;
}

}  // namespace

TEST_CASE("delay law constructors reject invalid parameters") {
  CHECK_THROWS_AS(DelayLaw::dirac(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(DelayLaw::uniform(1.0, 2.5), std::invalid_argument);  // support < 0
  CHECK_THROWS_AS(DelayLaw::uniform(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(DelayLaw::interval_averaged(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DelayLaw::interval_averaged(1.0, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(DelayLaw::empirical({}), std::invalid_argument);
  CHECK_THROWS_AS(DelayLaw::empirical({0.5, -0.2}), std::invalid_argument);
}

TEST_CASE("support bounds and means") {
  CHECK(DelayLaw::dirac(1.5).tau_max() == 1.5);
  CHECK(DelayLaw::uniform(1.5, 0.6).tau_max() == doctest::Approx(1.8));
  CHECK(DelayLaw::uniform(1.5, 0.6).tau_min() == doctest::Approx(1.2));
  CHECK(DelayLaw::interval_averaged(1.0, 1.1).tau_max() == doctest::Approx(2.1));
  CHECK(DelayLaw::interval_averaged(1.0, 1.1).mean() == doctest::Approx(1.1 + 1.0 / 3.0));
  CHECK(DelayLaw::empirical({0.3, 0.9, 0.1}).tau_max() == 0.9);
  CHECK(DelayLaw::empirical({0.3, 0.9, 0.1}).tau_min() == 0.1);
}

TEST_CASE("delay_sample: dirac exact, uniform support and mean") {
  CounterRng rng(42, 1);
  for (int i = 0; i < 100; ++i) CHECK(DelayLaw::dirac(1.5).sample(rng) == 1.5);

  const auto law = DelayLaw::uniform(1.5, 0.6);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double d = law.sample(rng);
    REQUIRE(d >= 1.2);
    REQUIRE(d <= 1.8);
    acc += d;
  }
  CHECK(acc / n == doctest::Approx(1.5).epsilon(0.01 / 1.5));
}

TEST_CASE("delay_sample: interval-averaged mean is a/3") {
  CounterRng rng(43, 1);
  const auto law = DelayLaw::interval_averaged(1.0, 0.0);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += law.sample(rng);
  CHECK(acc / n == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("delay_sample histograms pass chi-square GOF at 0.01") {
  const int n = 100000, bins = 20;

  SUBCASE("uniform") {
    CounterRng rng(7, 2);
    const auto law = DelayLaw::uniform(1.5, 0.6);
    std::vector<double> counts(bins, 0.0), expected(bins, static_cast<double>(n) / bins);
    for (int i = 0; i < n; ++i) {
      int b = static_cast<int>((law.sample(rng) - 1.2) / 0.6 * bins);
      counts[std::clamp(b, 0, bins - 1)] += 1.0;
    }
    CHECK(oracles::chi_square_gof(counts, expected).p_value > 0.01);
  }

  SUBCASE("interval-averaged") {
    CounterRng rng(9, 2);
    const auto law = DelayLaw::interval_averaged(2.0, 0.5);
    // CDF F(r) = 2r/a - r^2/a^2 over the shifted support
    std::vector<double> counts(bins, 0.0), expected(bins, 0.0);
    for (int b = 0; b < bins; ++b) {
      const double r0 = 2.0 * b / bins, r1 = 2.0 * (b + 1) / bins;
      const auto cdf = [](double r) { return r - r * r / 4.0; };
      expected[b] = n * (cdf(r1) - cdf(r0));
    }
    for (int i = 0; i < n; ++i) {
      int b = static_cast<int>((law.sample(rng) - 0.5) / 2.0 * bins);
      counts[std::clamp(b, 0, bins - 1)] += 1.0;
    }
    CHECK(oracles::chi_square_gof(counts, expected).p_value > 0.01);
  }

  SUBCASE("empirical atoms are drawn with equal frequency") {
    CounterRng rng(11, 2);
    const auto law = DelayLaw::empirical({0.2, 0.5, 0.9, 1.4});
    std::vector<double> counts(4, 0.0), expected(4, n / 4.0);
    for (int i = 0; i < n; ++i) {
      const double d = law.sample(rng);
      if (d == 0.2) counts[0] += 1;
      else if (d == 0.5) counts[1] += 1;
      else if (d == 0.9) counts[2] += 1;
      else counts[3] += 1;
    }
    CHECK(oracles::chi_square_gof(counts, expected).p_value > 0.01);
  }
}

TEST_CASE("delay_quadrature: mass, moments, dirac atom") {
  CHECK_THROWS_AS(DelayLaw::dirac(1.0).quadrature(0), std::invalid_argument);

  const auto atom = DelayLaw::dirac(1.5).quadrature(32);
  REQUIRE(atom.size() == 1);
  CHECK(atom[0].node == 1.5);
  CHECK(atom[0].weight == 1.0);

  const auto uq = DelayLaw::uniform(1.5, 0.6).quadrature(16);
  double mass = 0.0, first = 0.0;
  for (const auto& q : uq) {
    CHECK(q.weight >= 0.0);
    CHECK(q.node >= 1.2);
    CHECK(q.node <= 1.8);
    mass += q.weight;
    first += q.weight * q.node;
  }
  CHECK(std::abs(mass - 1.0) < 1e-12);
  CHECK(std::abs(first - 1.5) < 1e-10);

  const auto iq = DelayLaw::interval_averaged(1.0, 1.1).quadrature(32);
  mass = 0.0;
  first = 0.0;
  for (const auto& q : iq) {
    CHECK(q.weight >= 0.0);
    mass += q.weight;
    first += q.weight * q.node;
  }
  CHECK(std::abs(mass - 1.0) < 1e-12);
  CHECK(std::abs(first - (1.1 + 1.0 / 3.0)) < 1e-8);

  const auto eq = DelayLaw::empirical({0.1, 0.7}).quadrature(5);
  REQUIRE(eq.size() == 2);
  CHECK(eq[0].weight == doctest::Approx(0.5));
}

TEST_CASE("delay_laplace: pinned values") {
  CHECK(DelayLaw::dirac(1.5).laplace({0.0, 0.0}) == cplx{1.0, 0.0});
  CHECK(std::abs(DelayLaw::uniform(2.0, 1.0).laplace({0.0, 0.0}) - 1.0) < 1e-14);
  CHECK(std::abs(DelayLaw::interval_averaged(3.0, 0.2).laplace({0.0, 0.0}) - 1.0) < 1e-14);

  // int_0^1 e^{-r}(2 - 2r) dr = 2/e
  const double two_over_e = oracles::adaptive_simpson(
      [](double r) { return std::exp(-r) * (2.0 - 2.0 * r); }, 0.0, 1.0);
  CHECK(std::abs(DelayLaw::interval_averaged(1.0, 0.0).laplace({1.0, 0.0}) - two_over_e) < 1e-10);
  CHECK(DelayLaw::interval_averaged(1.0, 0.0).laplace({1.0, 0.0}).real() ==
        doctest::Approx(0.735759).epsilon(2e-6));

  // uniform collapses to dirac as delta -> 0+
  CHECK(std::abs(DelayLaw::uniform(1.5, 1e-12).laplace({1.0, 0.0}) - std::exp(-1.5)) < 1e-9);
}

TEST_CASE("closed-form transforms match quadrature on the certification grid") {
  // xi = 0.1 k + 0.1 k i, k = 0..100 (spec grid, |xi| <= ~14)
  const DelayLaw laws[] = {
      DelayLaw::dirac(1.5),
      DelayLaw::uniform(1.5, 0.6),
      DelayLaw::uniform(0.8, 1.6),
      DelayLaw::interval_averaged(1.0, 0.0),
      DelayLaw::interval_averaged(2.3, 1.1),
      DelayLaw::empirical({0.3, 0.7, 1.2, 0.05}),
  };
  for (const auto& law : laws) {
    for (int k = 0; k <= 100; ++k) {
      const cplx xi(0.1 * k, 0.1 * k);
      const cplx closed = law.laplace(xi);
      const cplx quad = laplace_by_quadrature(law, xi);
      CHECK(std::abs(closed - quad) < 1e-8);
    }
  }
}

TEST_CASE("transform magnitude bounded by 1 on the closed right half-plane") {
  const DelayLaw laws[] = {
      DelayLaw::dirac(0.7),
      DelayLaw::uniform(1.5, 0.6),
      DelayLaw::interval_averaged(1.7, 0.4),
      DelayLaw::empirical({0.2, 1.0, 0.6}),
  };
  CounterRng rng(5, 9);
  for (const auto& law : laws) {
    for (int t = 0; t < 400; ++t) {
      const cplx xi(8.0 * rng.uniform(), 16.0 * (rng.uniform() - 0.5));
      CHECK(std::abs(law.laplace(xi)) <= 1.0 + 1e-12);
    }
    CHECK(std::abs(law.laplace({0.0, 5.0})) <= 1.0 + 1e-12);
  }
}
