#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "delayfield/quadrature.hpp"
#include "delayfield/rng.hpp"

namespace delayfield {

/// Probability law of a transmission delay, supported on [0, tau_max].
///
/// Variants:
///   Dirac(tau)                point mass at tau
///   Uniform(tau, delta)       uniform on [tau - delta/2, tau + delta/2], delta <= 2 tau
///   IntervalAveraged(a, tau_s) tau_s + r with density (2/a - 2r/a^2) on r in [0, a]
///                             (distance distribution of uniform points on [0, a], speed c = 1)
///   Empirical(samples)        equal-weight atoms at the samples
class DelayLaw {
 public:
  struct Dirac {
    double tau;
  };
  struct Uniform {
    double tau;
    double delta;
  };
  struct IntervalAveraged {
    double a;
    double tau_s;
  };
  struct Empirical {
    std::vector<double> samples;
  };
  using Variant = std::variant<Dirac, Uniform, IntervalAveraged, Empirical>;

  static DelayLaw dirac(double tau);
  static DelayLaw uniform(double tau, double delta);
  static DelayLaw interval_averaged(double a, double tau_s);
  static DelayLaw empirical(std::vector<double> samples);

  double tau_max() const;
  double tau_min() const;
  double mean() const;

  /// One i.i.d. draw. Dirac returns tau exactly.
  double sample(CounterRng& rng) const;

  /// Nodes inside the support, weights >= 0 summing to 1 (within 1e-12).
  /// Dirac yields a single node; continuous laws map Gauss-Legendre nodes onto
  /// the support weighted by the density; Empirical returns its atoms
  /// (n_nodes only validated). Rejects n_nodes < 1.
  std::vector<QuadratureNode> quadrature(int n_nodes) const;

  /// L(xi) = int e^{-xi u} d eta(u) over delays u >= 0 (closed forms; series
  /// fallback near xi = 0 keeps the removable singularities exact).
  std::complex<double> laplace(std::complex<double> xi) const;

  const Variant& variant() const { return v_; }

 private:
  explicit DelayLaw(Variant v);
  Variant v_;
};

}  // namespace delayfield
