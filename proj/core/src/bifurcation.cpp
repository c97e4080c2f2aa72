#include "delayfield/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace delayfield {

namespace {
using cplx = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

double slope_factor(double j_bar, double g, double lambda, SlopeConvention convention) {
  const double base = 1.0 + g * g * lambda * lambda / 2.0;
  const double denom =
      convention == SlopeConvention::Reconciled ? std::sqrt(base) : std::sqrt(kTwoPi * base);
  return j_bar * g / denom;
}

double effective_slope(const ModelConfig& config) {
  if (config.population_count() != 1)
    throw std::invalid_argument("effective_slope: one-population configs only");
  const auto& pp = config.populations[0];
  const double g = config.sigmoid.gain;
  const double vstar = pp.lambda * pp.lambda * pp.theta / 2.0;
  // d/dmu [scale * f(mu, v*)] at mu = 0 is scale * g phi(0) / sqrt(1 + g^2 v*)
  const double phi0 = 0.39894228040143267794;  // 1/sqrt(2 pi)
  return config.connectivity.j(0, 0) * config.activation_scale * g * phi0 /
         std::sqrt(1.0 + g * g * vstar);
}

cplx dispersion_residual(const DispersionContext& ctx, cplx xi) {
  return xi + 1.0 / ctx.theta - ctx.k * ctx.law.laplace(xi);
}

double pitchfork_threshold(double theta, double g, double lambda) {
  if (!(theta > 0.0) || !(g > 0.0))
    throw std::invalid_argument("pitchfork_threshold: theta and g must be > 0");
  return std::sqrt(1.0 + g * g * lambda * lambda / 2.0) / (g * theta);
}

std::optional<DiracHopf> hopf_dirac(double theta, double k) {
  if (!(k < 0.0)) throw std::invalid_argument("hopf_dirac: handles the inhibitory case k < 0");
  if (std::abs(k) * theta <= 1.0) return std::nullopt;
  const double omega = std::sqrt(k * k - 1.0 / (theta * theta));
  return DiracHopf{omega, (M_PI - std::atan(omega * theta)) / omega};
}

HopfLocus hopf_uniform(double theta, double k, std::span<const double> omega_grid) {
  if (!(k < 0.0)) throw std::invalid_argument("hopf_uniform: handles the inhibitory case k < 0");
  HopfLocus locus;
  locus.p1_name = "tau";
  locus.p2_name = "delta";
  for (double Om : omega_grid) {
    if (!(Om > 0.0)) continue;
    const double s = std::sin(Om) / Om;
    if (!(s > 0.0)) continue;  // negative effective gain flips the phase branch
    const double rad = k * k * s * s - 1.0 / (theta * theta);
    if (rad <= 0.0) continue;
    const double delta = 2.0 * Om / std::sqrt(rad);
    const double omega = 2.0 * Om / delta;
    const double tau = (M_PI - std::atan(omega * theta)) / omega;
    if (delta > 2.0 * tau) continue;  // support would reach negative delays
    HopfPoint pt{tau, delta, omega, 0, 0.0};
    DispersionContext ctx{theta, k, DelayLaw::uniform(tau, delta)};
    pt.residual = std::abs(dispersion_residual(ctx, cplx(0.0, omega)));
    if (verify_hopf(pt, ctx)) locus.points.push_back(pt);
  }
  return locus;
}

HopfLocus hopf_interval(double theta, double k, std::span<const double> omega_grid,
                        int max_branch) {
  if (!(k < 0.0)) throw std::invalid_argument("hopf_interval: handles the inhibitory case k < 0");
  HopfLocus locus;
  locus.p1_name = "a";
  locus.p2_name = "tau_s";
  // unit-interval transform via a throwaway law with tau_s = 0, a = 1
  const DelayLaw unit = DelayLaw::interval_averaged(1.0, 0.0);
  for (double Om : omega_grid) {
    if (!(Om > 0.0)) continue;
    const cplx L0 = unit.laplace(cplx(0.0, Om));
    const double rad = k * k * std::norm(L0) - 1.0 / (theta * theta);
    if (rad <= 0.0) continue;
    const double omega = std::sqrt(rad);
    const double a = Om / omega;
    // i omega + 1/theta = k L0 e^{-i omega tau_s}: argument fixes tau_s mod 2 pi / omega
    const cplx ratio = k * L0 / (cplx(0.0, omega) + 1.0 / theta);
    double phase = std::arg(ratio);
    if (phase < 0.0) phase += kTwoPi;
    for (int branch = 0; branch <= max_branch; ++branch) {
      const double tau_s = (phase + kTwoPi * branch) / omega;
      if (tau_s < 0.0) continue;
      HopfPoint pt{a, tau_s, omega, branch, 0.0};
      DispersionContext ctx{theta, k, DelayLaw::interval_averaged(a, tau_s)};
      pt.residual = std::abs(dispersion_residual(ctx, cplx(0.0, omega)));
      if (verify_hopf(pt, ctx)) locus.points.push_back(pt);
    }
  }
  return locus;
}

std::vector<HopfPoint> hopf_interval_first_curve(const HopfLocus& locus) {
  std::map<double, HopfPoint> best;  // keyed by a
  for (const auto& pt : locus.points) {
    auto it = best.find(pt.p1);
    if (it == best.end() || pt.p2 < it->second.p2) best[pt.p1] = pt;
  }
  std::vector<HopfPoint> out;
  out.reserve(best.size());
  for (auto& [a, pt] : best) out.push_back(pt);
  return out;
}

RootResult characteristic_root(const DispersionContext& ctx, cplx xi_init) {
  RootResult res;
  cplx xi = xi_init;
  for (int it = 0; it < 100; ++it) {
    const cplx h = dispersion_residual(ctx, xi);
    res.iterations = it + 1;
    if (std::abs(h) < 1e-12) {
      res.root = xi;
      res.residual = h;
      res.converged = true;
      return res;
    }
    const double step = 1e-7 * (1.0 + std::abs(xi));
    const cplx dh =
        (dispersion_residual(ctx, xi + step) - dispersion_residual(ctx, xi - step)) / (2.0 * step);
    if (!(std::abs(dh) > 0.0)) break;
    xi -= h / dh;
    if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) break;
  }
  res.root = xi;
  res.residual = dispersion_residual(ctx, xi);
  res.converged = std::abs(res.residual) < 1e-12;
  return res;
}

bool verify_hopf(const HopfPoint& point, const DispersionContext& ctx) {
  if (!(point.omega > 0.0)) return false;
  const cplx xi(0.0, point.omega);
  if (std::abs(dispersion_residual(ctx, xi)) >= 1e-10) return false;
  const double step = 1e-7 * (1.0 + point.omega);
  const cplx dh =
      (dispersion_residual(ctx, xi + step) - dispersion_residual(ctx, xi - step)) / (2.0 * step);
  return std::isfinite(dh.real()) && std::isfinite(dh.imag()) && std::abs(dh) > 1e-8;
}

}  // namespace delayfield
