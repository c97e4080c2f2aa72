#pragma once

namespace delayfield {

enum class SigmoidKind {
  ErfCentered,  // S(x) = (1/sqrt(2pi)) int_0^{gx} exp(-t^2/2) dt
};

struct SigmoidSpec {
  SigmoidKind kind = SigmoidKind::ErfCentered;
  double gain = 1.0;  // g > 0
};

/// S(x): odd, monotone increasing, |S| < 1/2.
double sigmoid_eval(const SigmoidSpec& s, double x);

/// f(mu, v) = E[S(X)] for X ~ N(mu, v). For the centered erf sigmoid this is
/// sigmoid_eval at mu / sqrt(1 + g^2 v). Rejects v < 0.
double gaussian_mean_activation(const SigmoidSpec& s, double mu, double v);

}  // namespace delayfield
