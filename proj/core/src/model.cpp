#include "delayfield/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace delayfield {

double ModelConfig::tau_max() const {
  double m = 0.0;
  for (const auto& law : delays) m = std::max(m, law.tau_max());
  return m;
}

double ModelConfig::tau_min() const {
  double m = delays.empty() ? 0.0 : delays.front().tau_min();
  for (const auto& law : delays) m = std::min(m, law.tau_min());
  return m;
}

double ModelConfig::coupling_sigmoid(double x) const {
  return activation_scale * sigmoid_eval(sigmoid, x);
}

double ModelConfig::coupling_activation(double mu, double v) const {
  return activation_scale * gaussian_mean_activation(sigmoid, mu, v);
}

void ModelConfig::validate() const {
  const std::size_t p = populations.size();
  if (p == 0) throw std::invalid_argument("model.populations: must be nonempty");
  for (std::size_t i = 0; i < p; ++i) {
    if (!(populations[i].theta > 0.0))
      throw std::invalid_argument("model.populations[" + std::to_string(i) + "].theta: must be > 0");
    if (!(populations[i].lambda >= 0.0))
      throw std::invalid_argument("model.populations[" + std::to_string(i) +
                                  "].lambda: must be >= 0");
    if (!std::isfinite(populations[i].input))
      throw std::invalid_argument("model.populations[" + std::to_string(i) +
                                  "].input: must be finite");
  }
  if (connectivity.populations != static_cast<int>(p))
    throw std::invalid_argument("model.connectivity: dimension differs from populations");
  if (connectivity.j_bar.size() != p * p || connectivity.sigma.size() != p * p)
    throw std::invalid_argument("model.connectivity: matrices must be P x P");
  for (double s : connectivity.sigma)
    if (!(s >= 0.0)) throw std::invalid_argument("model.connectivity.sigma: entries must be >= 0");
  for (double j : connectivity.j_bar)
    if (!std::isfinite(j)) throw std::invalid_argument("model.connectivity.j_bar: must be finite");
  if (delays.size() != p * p)
    throw std::invalid_argument("model.delays: must be a P x P matrix of laws");
  if (!(sigmoid.gain > 0.0)) throw std::invalid_argument("model.sigmoid.gain: must be > 0");
  if (!(activation_scale > 0.0))
    throw std::invalid_argument("model.activation_scale: must be > 0");
}

ModelConfig single_population_config(double theta, double lambda, double input, double j_bar,
                                     double sigma, double gain, DelayLaw law) {
  ModelConfig cfg;
  cfg.populations = {{theta, lambda, input}};
  cfg.connectivity = {1, {j_bar}, {sigma}};
  cfg.delays.push_back(std::move(law));
  cfg.sigmoid = {SigmoidKind::ErfCentered, gain};
  cfg.validate();
  return cfg;
}

SimGrid make_grid(double dt, double t_end, double tau_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid.dt: must be > 0");
  if (!(t_end >= dt)) throw std::invalid_argument("grid.t_end: must be >= dt");
  if (tau_max > 0.0 && dt > tau_max)
    throw std::invalid_argument("grid.dt: must be <= tau_max so delays are resolvable");
  SimGrid g;
  g.dt = dt;
  g.t_end = t_end;
  g.history_len = tau_max > 0.0 ? static_cast<int>(std::ceil(tau_max / dt - 1e-9)) : 0;
  return g;
}

}  // namespace delayfield
