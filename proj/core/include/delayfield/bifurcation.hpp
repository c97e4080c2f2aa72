#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delayfield/delay_law.hpp"
#include "delayfield/model.hpp"

namespace delayfield {

enum class SlopeConvention {
  Reconciled,    // k = J g / sqrt(1 + g^2 lambda^2 / 2)  (matches the locus values)
  PaperPrinted,  // k = J g / sqrt(2 pi (1 + g^2 lambda^2 / 2))
};

/// Linearized feedback gain at the stationary point (theta = 1 balance).
double slope_factor(double j_bar, double g, double lambda,
                    SlopeConvention convention = SlopeConvention::Reconciled);

/// Gain for a full one-population config: J g (scale/sqrt(2 pi)) / sqrt(1 + g^2 v*)
/// with v* = lambda^2 theta / 2; equals slope_factor for theta = 1 and the
/// default activation scale.
double effective_slope(const ModelConfig& config);

struct DispersionContext {
  double theta = 1.0;
  double k = 0.0;  // signed slope
  DelayLaw law = DelayLaw::dirac(0.0);
};

/// xi + 1/theta - k L(xi); roots are the characteristic exponents.
std::complex<double> dispersion_residual(const DispersionContext& ctx, std::complex<double> xi);

/// Critical positive coupling: slope_factor(Jc, g, lambda) = 1/theta,
/// independent of the delay law.
double pitchfork_threshold(double theta, double g, double lambda);

struct DiracHopf {
  double omega;
  double tau;
};

/// For k < -1/theta: omega = sqrt(k^2 - 1/theta^2), tau = (pi - atan(omega theta))/omega.
/// nullopt when |k| theta <= 1 (no Hopf).
std::optional<DiracHopf> hopf_dirac(double theta, double k);

struct HopfPoint {
  double p1 = 0.0;  // (tau, delta) for uniform loci, (a, tau_s) for interval loci
  double p2 = 0.0;
  double omega = 0.0;
  int branch = 0;
  double residual = 0.0;  // |dispersion_residual(i omega)| under the concrete law
};

struct HopfLocus {
  std::string p1_name;
  std::string p2_name;
  std::vector<HopfPoint> points;
};

/// Hopf curve in the (tau, delta) plane parametrized by Omega = omega delta / 2.
/// Omega values violating k^2 sin^2(Omega)/Omega^2 > 1/theta^2 are skipped;
/// every emitted point is certified by verify_hopf.
HopfLocus hopf_uniform(double theta, double k, std::span<const double> omega_grid);

/// Hopf curves in the (a, tau_s) plane parametrized by Omega = omega a, one
/// point per branch index with tau_s >= 0.
HopfLocus hopf_interval(double theta, double k, std::span<const double> omega_grid,
                        int max_branch = 3);

/// Pointwise-minimal tau_s over branches (the first bifurcation), ordered by a.
std::vector<HopfPoint> hopf_interval_first_curve(const HopfLocus& locus);

struct RootResult {
  std::complex<double> root;
  bool converged = false;
  int iterations = 0;
  std::complex<double> residual;
};

/// Newton iteration on the dispersion residual with central-difference
/// derivative; converged when |residual| < 1e-12 within 100 iterations.
/// Non-convergence is reported through the result, with the last iterate.
RootResult characteristic_root(const DispersionContext& ctx, std::complex<double> xi_init);

/// True iff |dispersion_residual(i omega)| < 1e-10, omega > 0, and the root is
/// simple (finite nonzero residual derivative).
bool verify_hopf(const HopfPoint& point, const DispersionContext& ctx);

}  // namespace delayfield
