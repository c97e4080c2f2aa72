#include "delayfield/sigmoid.hpp"

#include <cmath>
#include <stdexcept>

namespace delayfield {

double sigmoid_eval(const SigmoidSpec& s, double x) {
  // (1/sqrt(2pi)) int_0^{gx} e^{-t^2/2} dt = erf(gx/sqrt(2)) / 2
  return 0.5 * std::erf(s.gain * x * M_SQRT1_2);
}

double gaussian_mean_activation(const SigmoidSpec& s, double mu, double v) {
  if (v < 0.0) throw std::invalid_argument("gaussian_mean_activation: v must be >= 0");
  const double g = s.gain;
  return sigmoid_eval(s, mu / std::sqrt(1.0 + g * g * v));
}

}  // namespace delayfield
