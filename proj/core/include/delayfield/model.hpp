#pragma once

#include <cstdint>
#include <vector>

#include "delayfield/delay_law.hpp"
#include "delayfield/sigmoid.hpp"

namespace delayfield {

/// theta > 0, lambda >= 0, constant drive per unit time.
struct PopulationParams {
  double theta = 1.0;
  double lambda = 0.0;
  double input = 0.0;
};

/// P x P mean weights and weight-noise amplitudes, row = post-synaptic population.
struct Connectivity {
  int populations = 0;
  std::vector<double> j_bar;  // row-major P*P
  std::vector<double> sigma;  // row-major P*P, entrywise >= 0

  double j(int a, int g) const { return j_bar[static_cast<std::size_t>(a) * populations + g]; }
  double s(int a, int g) const { return sigma[static_cast<std::size_t>(a) * populations + g]; }
};

// Normalization of the activation entering the dynamics. With the default
// sqrt(2 pi), the linearized gain at the stationary point equals
// J g / sqrt(1 + g^2 v*), the convention under which the dispersion-relation
// module and all bifurcation loci are expressed. Setting it to 1 reproduces
// the alternative printed normalization (gain reduced by 1/sqrt(2 pi)).
inline constexpr double kReconciledActivationScale = 2.5066282746310005024;  // sqrt(2 pi)

struct ModelConfig {
  std::vector<PopulationParams> populations;
  Connectivity connectivity;
  std::vector<DelayLaw> delays;  // row-major P*P, eta_{alpha gamma}
  SigmoidSpec sigmoid;
  double activation_scale = kReconciledActivationScale;

  int population_count() const { return static_cast<int>(populations.size()); }
  const DelayLaw& delay(int a, int g) const {
    return delays[static_cast<std::size_t>(a) * populations.size() + g];
  }

  /// Largest possible delay across all population pairs (0 for empty delays).
  double tau_max() const;
  /// Smallest support point across all pairs.
  double tau_min() const;

  /// Activation entering the drift/diffusion: activation_scale * S(x).
  double coupling_sigmoid(double x) const;
  /// Activation under the mean-field Gaussian law: activation_scale * f(mu, v).
  double coupling_activation(double mu, double v) const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Convenience builder for the one-population configurations used throughout.
ModelConfig single_population_config(double theta, double lambda, double input, double j_bar,
                                     double sigma, double gain, DelayLaw law);

/// Uniform time grid with dt-step history of ceil(tau_max/dt) steps before 0.
struct SimGrid {
  double dt = 1e-3;
  double t_end = 1.0;
  int history_len = 0;

  int steps() const { return static_cast<int>(std::ceil(t_end / dt - 1e-9)); }
};

/// Validates dt > 0, t_end >= dt, dt <= tau_max when tau_max > 0.
SimGrid make_grid(double dt, double t_end, double tau_max);

}  // namespace delayfield
