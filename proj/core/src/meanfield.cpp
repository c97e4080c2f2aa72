#include "delayfield/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delayfield/errors.hpp"

namespace delayfield {

MomentHistory MomentHistory::constant(std::vector<double> mu0, std::vector<double> v0) {
  MomentHistory h;
  h.mu = [mu0 = std::move(mu0)](int pop, double) { return mu0[pop]; };
  h.v = [v0 = std::move(v0)](int pop, double) { return v0[pop]; };
  return h;
}

MomentTrajectory::MomentTrajectory(int populations, double dt, int history_len, int steps)
    : populations_(populations),
      dt_(dt),
      history_len_(history_len),
      steps_(steps),
      rows_(static_cast<std::size_t>(history_len + steps + 1)) {
  const std::size_t n = rows_ * populations_;
  mu_.assign(n, 0.0);
  v_.assign(n, 0.0);
  dmu_.assign(n, 0.0);
  dv_.assign(n, 0.0);
  dmu_hist_end_.assign(populations_, 0.0);
  dv_hist_end_.assign(populations_, 0.0);
}

MomentState MomentTrajectory::state(int k) const {
  MomentState s;
  s.mu.resize(populations_);
  s.v.resize(populations_);
  for (int p = 0; p < populations_; ++p) {
    s.mu[p] = mu(p, k);
    s.v[p] = v(p, k);
  }
  return s;
}

void MomentTrajectory::set(int pop, int k, double m, double var) {
  mu_[idx(pop, k)] = m;
  v_[idx(pop, k)] = var;
}

void MomentTrajectory::set_deriv(int pop, int k, double dm, double dvar) {
  dmu_[idx(pop, k)] = dm;
  dv_[idx(pop, k)] = dvar;
}

void MomentTrajectory::set_history_end_deriv(int pop, double dm, double dvar) {
  dmu_hist_end_[pop] = dm;
  dv_hist_end_[pop] = dvar;
}

double MomentTrajectory::interp(const std::vector<double>& val, const std::vector<double>& der,
                                const std::vector<double>& der_hist_end, int pop,
                                double t) const {
  const double x = t / dt_ + history_len_;
  int j = static_cast<int>(std::floor(x));
  const int last = filled_;
  if (j < 0) j = 0;
  if (j >= last) j = last - 1;  // extrapolate past the filled front with the last segment
  if (j < 0) {
    // nothing integrated yet and no history segment: linear from the single point
    return val[idx(pop, 0)] + der[idx(pop, 0)] * (x - 0.0) * dt_;
  }
  const double s = x - j;
  const double y0 = val[idx(pop, j)];
  const double y1 = val[idx(pop, j + 1)];
  const double d0 = der[idx(pop, j)] * dt_;
  // segment ending exactly at t=0 uses the history-side derivative on its right
  const double d1 = ((j + 1 == history_len_) ? der_hist_end[pop] : der[idx(pop, j + 1)]) * dt_;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * d1;
}

double MomentTrajectory::mu_at(int pop, double t) const {
  return interp(mu_, dmu_, dmu_hist_end_, pop, t);
}

double MomentTrajectory::v_at(int pop, double t) const {
  return interp(v_, dv_, dv_hist_end_, pop, t);
}

namespace {

// stage evaluations can transiently dip v below 0 by rounding; clamp locally
double activation_unchecked(const ModelConfig& cfg, double mu, double v) {
  return cfg.coupling_activation(mu, v < 0.0 ? 0.0 : v);
}

struct Rhs {
  const ModelConfig& cfg;
  const MomentTrajectory& traj;
  std::vector<std::vector<QuadratureNode>> quad;  // per (alpha, gamma)
  int P;

  Rhs(const ModelConfig& c, const MomentTrajectory& tr, int nodes)
      : cfg(c), traj(tr), P(c.population_count()) {
    quad.reserve(static_cast<std::size_t>(P) * P);
    for (int a = 0; a < P; ++a)
      for (int g = 0; g < P; ++g) quad.push_back(c.delay(a, g).quadrature(nodes));
  }

  // delayed convolution Conv_ag(t) from the interpolant only
  double conv(int a, int g, double t) const {
    double acc = 0.0;
    for (const auto& q : quad[static_cast<std::size_t>(a) * P + g])
      acc += q.weight * activation_unchecked(cfg, traj.mu_at(g, t - q.node), traj.v_at(g, t - q.node));
    return acc;
  }

  void operator()(double t, const std::vector<double>& mu, const std::vector<double>& v,
                  std::vector<double>& dmu, std::vector<double>& dv) const {
    for (int a = 0; a < P; ++a) {
      const auto& pp = cfg.populations[a];
      double drift = -mu[a] / pp.theta + pp.input;
      double vforce = -2.0 * v[a] / pp.theta + pp.lambda * pp.lambda;
      for (int g = 0; g < P; ++g) {
        const double c = conv(a, g, t);
        drift += cfg.connectivity.j(a, g) * c;
        const double sg = cfg.connectivity.s(a, g);
        vforce += sg * sg * c * c;
      }
      dmu[a] = drift;
      dv[a] = vforce;
    }
  }
};

}  // namespace

MomentTrajectory integrate_moments(const ModelConfig& config, const SimGrid& grid,
                                   const MomentHistory& history, const IntegrateOptions& options) {
  config.validate();
  if (!history.mu || !history.v)
    throw std::invalid_argument("integrate_moments: history functions must be set");
  const int P = config.population_count();
  const int H = grid.history_len;
  const int steps = grid.steps();
  const double dt = grid.dt;

  MomentTrajectory traj(P, dt, H, steps);

  // sample the initial function and difference its derivatives
  for (int p = 0; p < P; ++p) {
    for (int k = 0; k <= H; ++k) traj.set(p, k, history.mu(p, traj.time(k)), history.v(p, traj.time(k)));
    for (int k = 0; k < H; ++k) {
      double dm, dvv;
      if (k == 0) {
        dm = (traj.mu(p, 1) - traj.mu(p, 0)) / dt;
        dvv = (traj.v(p, 1) - traj.v(p, 0)) / dt;
      } else {
        dm = (traj.mu(p, k + 1) - traj.mu(p, k - 1)) / (2 * dt);
        dvv = (traj.v(p, k + 1) - traj.v(p, k - 1)) / (2 * dt);
      }
      traj.set_deriv(p, k, dm, dvv);
    }
    if (H > 0) {
      traj.set_history_end_deriv(p, (traj.mu(p, H) - traj.mu(p, H - 1)) / dt,
                                 (traj.v(p, H) - traj.v(p, H - 1)) / dt);
    }
  }
  traj.set_filled(H);

  Rhs rhs(config, traj, options.quadrature_nodes);

  std::vector<double> y_mu(P), y_v(P), k1m(P), k1v(P), k2m(P), k2v(P), k3m(P), k3v(P), k4m(P),
      k4v(P), tmpm(P), tmpv(P);

  for (int p = 0; p < P; ++p) {
    y_mu[p] = traj.mu(p, H);
    y_v[p] = traj.v(p, H);
  }
  rhs(0.0, y_mu, y_v, k1m, k1v);
  for (int p = 0; p < P; ++p) traj.set_deriv(p, H, k1m[p], k1v[p]);

  const double guard = options.divergence_guard;
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    const int k = H + n;
    for (int p = 0; p < P; ++p) {
      k1m[p] = traj.dmu(p, k);
      k1v[p] = traj.dv(p, k);
    }
    for (int p = 0; p < P; ++p) {
      tmpm[p] = y_mu[p] + 0.5 * dt * k1m[p];
      tmpv[p] = y_v[p] + 0.5 * dt * k1v[p];
    }
    rhs(t + 0.5 * dt, tmpm, tmpv, k2m, k2v);
    for (int p = 0; p < P; ++p) {
      tmpm[p] = y_mu[p] + 0.5 * dt * k2m[p];
      tmpv[p] = y_v[p] + 0.5 * dt * k2v[p];
    }
    rhs(t + 0.5 * dt, tmpm, tmpv, k3m, k3v);
    for (int p = 0; p < P; ++p) {
      tmpm[p] = y_mu[p] + dt * k3m[p];
      tmpv[p] = y_v[p] + dt * k3v[p];
    }
    rhs(t + dt, tmpm, tmpv, k4m, k4v);
    for (int p = 0; p < P; ++p) {
      y_mu[p] += dt / 6.0 * (k1m[p] + 2 * k2m[p] + 2 * k3m[p] + k4m[p]);
      y_v[p] += dt / 6.0 * (k1v[p] + 2 * k2v[p] + 2 * k3v[p] + k4v[p]);
      if (!(std::abs(y_mu[p]) <= guard) || !(std::abs(y_v[p]) <= guard))
        throw DivergenceError("integrate_moments: |state| exceeded " + std::to_string(guard) +
                              " at t=" + std::to_string(t + dt));
      traj.set(p, k + 1, y_mu[p], y_v[p]);
    }
    traj.set_filled(k + 1);
    // provisional derivative so sub-step delayed reads see a sane segment, then
    // the accepted-point derivative (reused as next step's k1)
    for (int p = 0; p < P; ++p) traj.set_deriv(p, k + 1, k4m[p], k4v[p]);
    rhs(t + dt, y_mu, y_v, k1m, k1v);
    for (int p = 0; p < P; ++p) traj.set_deriv(p, k + 1, k1m[p], k1v[p]);
  }
  return traj;
}

MomentState stationary_point(const ModelConfig& config) {
  config.validate();
  for (const auto& pp : config.populations)
    if (pp.input != 0.0)
      throw std::domain_error("stationary_point: requires zero input (root finding not provided)");
  if (config.sigmoid.kind != SigmoidKind::ErfCentered)
    throw std::domain_error("stationary_point: requires the centered sigmoid");

  const int P = config.population_count();
  MomentState s;
  s.mu.assign(P, 0.0);
  s.v.resize(P);
  for (int p = 0; p < P; ++p) {
    const auto& pp = config.populations[p];
    s.v[p] = pp.lambda * pp.lambda * pp.theta / 2.0;
  }
  // residual: f(0, v) = 0 exactly, so only the v balance contributes
  for (int p = 0; p < P; ++p) {
    const auto& pp = config.populations[p];
    const double r = -2.0 * s.v[p] / pp.theta + pp.lambda * pp.lambda;
    if (std::abs(r) >= 1e-12)
      throw std::logic_error("stationary_point: residual " + std::to_string(r));
  }
  return s;
}

Classification classify_trajectory(const MomentTrajectory& traj, int pop, double t1, double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("classify_trajectory: need t1 < t2");
  const int k1 = static_cast<int>(std::ceil(t1 / traj.dt() - 1e-9)) + traj.history_len();
  const int k2 = static_cast<int>(std::floor(t2 / traj.dt() + 1e-9)) + traj.history_len();
  if (k1 < 0 || k2 > traj.history_len() + traj.steps() || k2 - k1 < 8)
    throw std::invalid_argument("classify_trajectory: window outside the integrated horizon");

  double lo = traj.mu(pop, k1), hi = lo;
  for (int k = k1; k <= k2; ++k) {
    const double m = traj.mu(pop, k);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  Classification out;
  if (hi - lo < kOscillationThreshold) {
    out.kind = Classification::Kind::Stationary;
    return out;
  }

  // strict local maxima with parabolic refinement of the peak time
  std::vector<double> peak_times;
  for (int k = k1 + 1; k < k2; ++k) {
    const double a = traj.mu(pop, k - 1), b = traj.mu(pop, k), c = traj.mu(pop, k + 1);
    if (b > a && b >= c) {
      const double denom = a - 2 * b + c;
      const double shift = (denom != 0.0) ? 0.5 * (a - c) / denom : 0.0;
      peak_times.push_back(traj.time(k) + shift * traj.dt());
    }
  }
  if (peak_times.size() < 4) {
    out.kind = Classification::Kind::Inconclusive;
    out.amplitude = 0.5 * (hi - lo);
    return out;
  }
  double spacing = 0.0;
  for (std::size_t i = 1; i < peak_times.size(); ++i) spacing += peak_times[i] - peak_times[i - 1];
  spacing /= static_cast<double>(peak_times.size() - 1);
  out.kind = Classification::Kind::Oscillatory;
  out.pulsation = 2.0 * M_PI / spacing;
  out.amplitude = 0.5 * (hi - lo);
  return out;
}

}  // namespace delayfield
