#include "delayfield/delay_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delayfield {

namespace {

using cplx = std::complex<double>;

// sinh(z)/z with the removable singularity filled by series
cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

// (2/z)(1 - (1 - e^{-z})/z): transform of the unit-interval distance density 2(1-t)
cplx interval_unit_transform(cplx z) {
  if (std::abs(z) < 1e-4) {
    // sum 2 (-z)^n / (n! (n+1)(n+2))
    return 1.0 - z / 3.0 + z * z / 12.0 - z * z * z / 60.0;
  }
  return (2.0 / z) * (1.0 - (1.0 - std::exp(-z)) / z);
}

}  // namespace

DelayLaw::DelayLaw(Variant v) : v_(std::move(v)) {}

DelayLaw DelayLaw::dirac(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("DelayLaw::dirac: tau must be >= 0");
  return DelayLaw(Dirac{tau});
}

DelayLaw DelayLaw::uniform(double tau, double delta) {
  if (!(tau >= 0.0)) throw std::invalid_argument("DelayLaw::uniform: tau must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("DelayLaw::uniform: delta must be > 0");
  if (delta > 2.0 * tau)
    throw std::invalid_argument("DelayLaw::uniform: delta must be <= 2 tau (support >= 0)");
  return DelayLaw(Uniform{tau, delta});
}

DelayLaw DelayLaw::interval_averaged(double a, double tau_s) {
  if (!(a > 0.0)) throw std::invalid_argument("DelayLaw::interval_averaged: a must be > 0");
  if (!(tau_s >= 0.0))
    throw std::invalid_argument("DelayLaw::interval_averaged: tau_s must be >= 0");
  return DelayLaw(IntervalAveraged{a, tau_s});
}

DelayLaw DelayLaw::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("DelayLaw::empirical: samples must be nonempty");
  for (double s : samples)
    if (!(s >= 0.0)) throw std::invalid_argument("DelayLaw::empirical: samples must be >= 0");
  return DelayLaw(Empirical{std::move(samples)});
}

double DelayLaw::tau_max() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) return law.tau;
        if constexpr (std::is_same_v<T, Uniform>) return law.tau + law.delta / 2.0;
        if constexpr (std::is_same_v<T, IntervalAveraged>) return law.tau_s + law.a;
        if constexpr (std::is_same_v<T, Empirical>)
          return *std::max_element(law.samples.begin(), law.samples.end());
      },
      v_);
}

double DelayLaw::tau_min() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) return law.tau;
        if constexpr (std::is_same_v<T, Uniform>) return law.tau - law.delta / 2.0;
        if constexpr (std::is_same_v<T, IntervalAveraged>) return law.tau_s;
        if constexpr (std::is_same_v<T, Empirical>)
          return *std::min_element(law.samples.begin(), law.samples.end());
      },
      v_);
}

double DelayLaw::mean() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) return law.tau;
        if constexpr (std::is_same_v<T, Uniform>) return law.tau;
        if constexpr (std::is_same_v<T, IntervalAveraged>) return law.tau_s + law.a / 3.0;
        if constexpr (std::is_same_v<T, Empirical>) {
          double s = 0.0;
          for (double x : law.samples) s += x;
          return s / static_cast<double>(law.samples.size());
        }
      },
      v_);
}

double DelayLaw::sample(CounterRng& rng) const {
  return std::visit(
      [&rng](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) return law.tau;
        if constexpr (std::is_same_v<T, Uniform>)
          return law.tau + law.delta * (rng.uniform() - 0.5);
        if constexpr (std::is_same_v<T, IntervalAveraged>) {
          // CDF F(r) = 2r/a - r^2/a^2, inverse r = a (1 - sqrt(1 - u))
          const double u = rng.uniform();
          return law.tau_s + law.a * (1.0 - std::sqrt(1.0 - u));
        }
        if constexpr (std::is_same_v<T, Empirical>) {
          const std::size_t m = law.samples.size();
          std::size_t idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m));
          if (idx >= m) idx = m - 1;  // u = 1 edge
          return law.samples[idx];
        }
      },
      v_);
}

std::vector<QuadratureNode> DelayLaw::quadrature(int n_nodes) const {
  if (n_nodes < 1) throw std::invalid_argument("DelayLaw::quadrature: n_nodes must be >= 1");
  return std::visit(
      [n_nodes](const auto& law) -> std::vector<QuadratureNode> {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
          return {{law.tau, 1.0}};
        }
        if constexpr (std::is_same_v<T, Uniform>) {
          // density 1/delta on [tau - delta/2, tau + delta/2]; jacobian delta/2
          auto gl = gauss_legendre(n_nodes);
          std::vector<QuadratureNode> out(gl.size());
          for (std::size_t i = 0; i < gl.size(); ++i)
            out[i] = {law.tau + 0.5 * law.delta * gl[i].node, 0.5 * gl[i].weight};
          return out;
        }
        if constexpr (std::is_same_v<T, IntervalAveraged>) {
          // density (2/a - 2r/a^2) on [0, a]; jacobian a/2
          auto gl = gauss_legendre(n_nodes);
          std::vector<QuadratureNode> out(gl.size());
          for (std::size_t i = 0; i < gl.size(); ++i) {
            const double r = 0.5 * law.a * (gl[i].node + 1.0);
            out[i] = {law.tau_s + r, gl[i].weight * (1.0 - r / law.a)};
          }
          return out;
        }
        if constexpr (std::is_same_v<T, Empirical>) {
          const double w = 1.0 / static_cast<double>(law.samples.size());
          std::vector<QuadratureNode> out(law.samples.size());
          for (std::size_t i = 0; i < law.samples.size(); ++i) out[i] = {law.samples[i], w};
          return out;
        }
      },
      v_);
}

std::complex<double> DelayLaw::laplace(std::complex<double> xi) const {
  return std::visit(
      [xi](const auto& law) -> cplx {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
          return std::exp(-xi * law.tau);
        }
        if constexpr (std::is_same_v<T, Uniform>) {
          return std::exp(-xi * law.tau) * sinhc(xi * law.delta * 0.5);
        }
        if constexpr (std::is_same_v<T, IntervalAveraged>) {
          return std::exp(-xi * law.tau_s) * interval_unit_transform(xi * law.a);
        }
        if constexpr (std::is_same_v<T, Empirical>) {
          cplx acc{0.0, 0.0};
          for (double s : law.samples) acc += std::exp(-xi * s);
          return acc / static_cast<double>(law.samples.size());
        }
      },
      v_);
}

}  // namespace delayfield
