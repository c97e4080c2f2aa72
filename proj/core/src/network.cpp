#include "delayfield/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "delayfield/errors.hpp"
#include "delayfield/parallel.hpp"
#include "delayfield/rng.hpp"

namespace delayfield {

namespace {

int find_population(const std::vector<int>& offsets, int i) {
  int p = 0;
  while (offsets[p + 1] <= i) ++p;
  return p;
}

double inv_cdf_sample(const DelayLaw& law, double u) {
  return std::visit(
      [u](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, DelayLaw::Dirac>) return l.tau;
        if constexpr (std::is_same_v<T, DelayLaw::Uniform>) return l.tau + l.delta * (u - 0.5);
        if constexpr (std::is_same_v<T, DelayLaw::IntervalAveraged>)
          return l.tau_s + l.a * (1.0 - std::sqrt(1.0 - u));
        if constexpr (std::is_same_v<T, DelayLaw::Empirical>) {
          std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(l.samples.size()));
          if (idx >= l.samples.size()) idx = l.samples.size() - 1;
          return l.samples[idx];
        }
      },
      law.variant());
}

}  // namespace

NetworkRealization::NetworkRealization(const ModelConfig& config, std::vector<int> pop_sizes,
                                       std::optional<std::vector<double>> positions,
                                       double position_tau_s, std::uint64_t master_seed)
    : pop_sizes_(std::move(pop_sizes)),
      laws_(config.delays),
      positions_(std::move(positions)),
      position_tau_s_(position_tau_s),
      seed_(master_seed) {
  offsets_.assign(pop_sizes_.size() + 1, 0);
  for (std::size_t p = 0; p < pop_sizes_.size(); ++p) offsets_[p + 1] = offsets_[p] + pop_sizes_[p];
  total_ = offsets_.back();
}

int NetworkRealization::population_of(int i) const { return find_population(offsets_, i); }

double NetworkRealization::delay(int i, int j) const {
  if (positions_) return std::abs((*positions_)[i] - (*positions_)[j]) + position_tau_s_;
  const double u = uniforms_at(seed_, substream(NoiseKind::DelayDraw, static_cast<std::uint64_t>(i)),
                               static_cast<std::uint64_t>(j))[0];
  return inv_cdf_sample(law(population_of(i), population_of(j)), u);
}

NetworkRealization build_realization(const ModelConfig& config, std::vector<int> pop_sizes,
                                     const Topology& topology, std::uint64_t seed) {
  config.validate();
  if (static_cast<int>(pop_sizes.size()) != config.population_count())
    throw std::invalid_argument("build_realization: pop_sizes length differs from populations");
  for (int n : pop_sizes)
    if (n < 1) throw std::invalid_argument("build_realization: all pop_sizes must be >= 1");

  if (const auto* ip = std::get_if<IntervalPositions>(&topology)) {
    for (const auto& law : config.delays) {
      const auto* ia = std::get_if<DelayLaw::IntervalAveraged>(&law.variant());
      if (!ia || ia->a != ip->a || ia->tau_s != ip->tau_s)
        throw std::invalid_argument(
            "build_realization: IntervalPositions requires every delay law to be the matching "
            "IntervalAveraged(a, tau_s)");
    }
    int total = 0;
    for (int n : pop_sizes) total += n;
    std::vector<double> pos(total);
    for (int i = 0; i < total; ++i)
      pos[i] =
          ip->a * uniforms_at(seed, substream(NoiseKind::Position, static_cast<std::uint64_t>(i)), 0)[0];
    return NetworkRealization(config, std::move(pop_sizes), std::move(pos), ip->tau_s, seed);
  }
  return NetworkRealization(config, std::move(pop_sizes), std::nullopt, 0.0, seed);
}

int TrajectorySet::population_of(int i) const { return find_population(pop_offsets, i); }

namespace {

struct SimBuffers {
  int N = 0, P = 0, H = 0, steps = 0;
  double dt = 0.0;
  std::vector<int> offsets;
  std::vector<int> pop_of;
  bool all_const_lag = true;
  std::vector<long long> const_lag;   // P*P, -1 when not constant
  std::vector<std::int32_t> lag;      // N*N when needed
  std::vector<double> s_ring;         // (H+1) x N
  std::vector<double> conv = {};      // steps x P x P for coupled runs

  int rmod(long long k) const {
    const long long m = H + 1;
    return static_cast<int>(((k % m) + m) % m);
  }
};

void validate_sim_inputs(const ModelConfig& config, const NetworkRealization& realization,
                         const SimGrid& grid) {
  config.validate();
  if (realization.population_count() != config.population_count())
    throw std::invalid_argument("simulate_network: realization/config population mismatch");
  const double tmin = config.tau_min();
  if (tmin > 0.0 && grid.dt > tmin / 10.0)
    throw std::invalid_argument("simulate_network: dt must be <= tau_min/10 to resolve delays");
  const int expected_hist =
      config.tau_max() > 0.0 ? static_cast<int>(std::ceil(config.tau_max() / grid.dt - 1e-9)) : 0;
  if (grid.history_len < expected_hist)
    throw std::invalid_argument("simulate_network: grid history too short for the delay laws");
}

SimBuffers prepare_buffers(const NetworkRealization& realization, const SimGrid& grid) {
  SimBuffers b;
  b.N = realization.neuron_count();
  b.P = realization.population_count();
  b.H = grid.history_len;
  b.steps = grid.steps();
  b.dt = grid.dt;
  b.offsets.assign(b.P + 1, 0);
  for (int p = 0; p < b.P; ++p) b.offsets[p + 1] = b.offsets[p] + realization.pop_sizes()[p];
  b.pop_of.resize(b.N);
  for (int p = 0; p < b.P; ++p)
    for (int i = b.offsets[p]; i < b.offsets[p + 1]; ++i) b.pop_of[i] = p;

  b.const_lag.assign(static_cast<std::size_t>(b.P) * b.P, -1);
  for (int a = 0; a < b.P; ++a)
    for (int g = 0; g < b.P; ++g) {
      const bool dirac = std::holds_alternative<DelayLaw::Dirac>(realization.law(a, g).variant());
      if (dirac && !realization.positions()) {
        const double tau = std::get<DelayLaw::Dirac>(realization.law(a, g).variant()).tau;
        b.const_lag[static_cast<std::size_t>(a) * b.P + g] =
            std::min<long long>(std::llround(tau / b.dt), b.H);
      } else {
        b.all_const_lag = false;
      }
    }

  if (!b.all_const_lag) {
    if (b.N > 8192)
      throw std::invalid_argument(
          "simulate_network: heterogeneous per-pair lags need an N x N table; N > 8192 refused");
    b.lag.resize(static_cast<std::size_t>(b.N) * b.N);
    parallel_for(static_cast<std::size_t>(b.N), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i)
        for (int j = 0; j < b.N; ++j)
          b.lag[i * b.N + j] = static_cast<std::int32_t>(std::min<long long>(
              std::llround(realization.delay(static_cast<int>(i), j) / b.dt), b.H));
    });
  }
  b.s_ring.assign(static_cast<std::size_t>(b.H + 1) * b.N, 0.0);
  return b;
}

std::vector<double> initial_states(const ModelConfig& config, const SimBuffers& b,
                                   const InitialCondition& init, std::uint64_t seed) {
  std::vector<double> x0(b.N);
  if (const auto* cg = std::get_if<ChaoticGaussian>(&init)) {
    if (static_cast<int>(cg->mu0.size()) != b.P || static_cast<int>(cg->v0.size()) != b.P)
      throw std::invalid_argument("simulate_network: init moments must have one entry per population");
    for (const double v : cg->v0)
      if (!(v >= 0.0)) throw std::invalid_argument("simulate_network: init v0 must be >= 0");
    for (int i = 0; i < b.N; ++i) {
      const int p = b.pop_of[i];
      x0[i] = cg->mu0[p] +
              std::sqrt(cg->v0[p]) *
                  normal_at(seed, substream(NoiseKind::InitState, static_cast<std::uint64_t>(i)), 0);
    }
  } else {
    const double c = std::get<FrozenHistory>(init).value;
    for (int i = 0; i < b.N; ++i) x0[i] = c;
  }
  (void)config;
  return x0;
}

// One Euler-Maruyama pass; when xbar/conv are provided, also advances the
// coupled mean-field particles with the identical noise draws.
void run_sim(const ModelConfig& config, SimBuffers& b, std::uint64_t seed,
             const SimOptions& options, TrajectorySet& net, TrajectorySet* coupled) {
  const int N = b.N, P = b.P, H = b.H;
  const double dt = b.dt;
  const double sqrt_dt = std::sqrt(dt);
  const int M = options.noise_substeps;
  if (M < 1) throw std::invalid_argument("simulate_network: noise_substeps must be >= 1");
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));
  const double guard = options.divergence_guard;

  // population sums for constant-lag pairs, per (alpha, gamma)
  std::vector<double> g_const(static_cast<std::size_t>(P) * P, 0.0);
  std::atomic<int> diverged{-1};

  for (int n = 0; n < b.steps; ++n) {
    const std::size_t row_now = static_cast<std::size_t>(H + n) * N;
    const std::size_t row_next = row_now + N;

    for (int a = 0; a < P; ++a)
      for (int g = 0; g < P; ++g) {
        const long long L = b.const_lag[static_cast<std::size_t>(a) * P + g];
        if (L < 0) continue;
        const double* ring_row = b.s_ring.data() + static_cast<std::size_t>(b.rmod(n - L)) * N;
        double acc = 0.0;
        for (int j = b.offsets[g]; j < b.offsets[g + 1]; ++j) acc += ring_row[j];
        g_const[static_cast<std::size_t>(a) * P + g] = acc;
      }

    double* ring_next = b.s_ring.data() + static_cast<std::size_t>(b.rmod(n + 1)) * N;

    parallel_for(static_cast<std::size_t>(N), [&](std::size_t lo, std::size_t hi) {
      std::vector<double> gsum(P);
      for (std::size_t iu = lo; iu < hi; ++iu) {
        const int i = static_cast<int>(iu);
        const int a = b.pop_of[i];
        const auto& pp = config.populations[a];

        for (int g = 0; g < P; ++g) {
          const long long L = b.const_lag[static_cast<std::size_t>(a) * P + g];
          if (L >= 0) {
            gsum[g] = g_const[static_cast<std::size_t>(a) * P + g];
          } else {
            const std::int32_t* lag_row = b.lag.data() + iu * N;
            double acc = 0.0;
            for (int j = b.offsets[g]; j < b.offsets[g + 1]; ++j)
              acc += b.s_ring[static_cast<std::size_t>(b.rmod(n - lag_row[j])) * N + j];
            gsum[g] = acc;
          }
        }

        double xi = 0.0;
        for (int m = 0; m < M; ++m)
          xi += normal_at(seed, substream(NoiseKind::Intrinsic, iu),
                          static_cast<std::uint64_t>(n) * M + m);
        xi *= inv_sqrt_m;

        const double x = net.states[row_now + iu];
        double drift = -x / pp.theta + pp.input;
        double diffusion = pp.lambda * sqrt_dt * xi;
        double xb = 0.0, driftb = 0.0, diffusionb = 0.0;
        if (coupled) {
          xb = coupled->states[row_now + iu];
          driftb = -xb / pp.theta + pp.input;
          diffusionb = pp.lambda * sqrt_dt * xi;
        }
        for (int g = 0; g < P; ++g) {
          const double ng = static_cast<double>(b.offsets[g + 1] - b.offsets[g]);
          double zeta = 0.0;
          for (int m = 0; m < M; ++m)
            zeta += normal_at(seed, substream(NoiseKind::Synaptic, iu, static_cast<std::uint64_t>(g)),
                              static_cast<std::uint64_t>(n) * M + m);
          zeta *= inv_sqrt_m;
          drift += config.connectivity.j(a, g) / ng * gsum[g];
          diffusion += config.connectivity.s(a, g) / ng * gsum[g] * sqrt_dt * zeta;
          if (coupled) {
            const double conv = b.conv[(static_cast<std::size_t>(n) * P + a) * P + g];
            driftb += config.connectivity.j(a, g) * conv;
            diffusionb += config.connectivity.s(a, g) * conv * sqrt_dt * zeta;
          }
        }
        const double x_new = x + dt * drift + diffusion;
        if (!(std::abs(x_new) <= guard)) diverged.store(n, std::memory_order_relaxed);
        net.states[row_next + iu] = x_new;
        ring_next[iu] = config.coupling_sigmoid(x_new);
        if (coupled) {
          const double xb_new = xb + dt * driftb + diffusionb;
          if (!(std::abs(xb_new) <= guard)) diverged.store(n, std::memory_order_relaxed);
          coupled->states[row_next + iu] = xb_new;
        }
      }
    });

    if (diverged.load(std::memory_order_relaxed) >= 0)
      throw DivergenceError("simulate_network: |X| exceeded " + std::to_string(guard) + " at t=" +
                            std::to_string((n + 1) * dt));
  }
}

TrajectorySet make_trajectory_set(const SimBuffers& b) {
  TrajectorySet t;
  t.dt = b.dt;
  t.history_len = b.H;
  t.steps = b.steps;
  t.pop_offsets = b.offsets;
  t.pop_sizes.resize(b.P);
  for (int p = 0; p < b.P; ++p) t.pop_sizes[p] = b.offsets[p + 1] - b.offsets[p];
  t.states.assign(static_cast<std::size_t>(t.rows()) * b.N, 0.0);
  return t;
}

void fill_history(const ModelConfig& config, SimBuffers& b, TrajectorySet& t,
                  const std::vector<double>& x0) {
  for (int k = 0; k <= b.H; ++k)
    std::copy(x0.begin(), x0.end(), t.states.begin() + static_cast<std::size_t>(k) * b.N);
  for (int r = 0; r <= b.H; ++r)
    for (int i = 0; i < b.N; ++i)
      b.s_ring[static_cast<std::size_t>(r) * b.N + i] = config.coupling_sigmoid(x0[i]);
}

}  // namespace

TrajectorySet simulate_network(const ModelConfig& config, const NetworkRealization& realization,
                               const SimGrid& grid, const InitialCondition& init,
                               std::uint64_t seed, const SimOptions& options) {
  validate_sim_inputs(config, realization, grid);
  SimBuffers b = prepare_buffers(realization, grid);
  TrajectorySet net = make_trajectory_set(b);
  const auto x0 = initial_states(config, b, init, seed);
  fill_history(config, b, net, x0);
  run_sim(config, b, seed, options, net, nullptr);
  return net;
}

std::pair<TrajectorySet, TrajectorySet> simulate_coupled_pair(
    const ModelConfig& config, const NetworkRealization& realization, const SimGrid& grid,
    const MomentTrajectory& meanfield_traj, const InitialCondition& init, std::uint64_t seed,
    const SimOptions& options) {
  validate_sim_inputs(config, realization, grid);
  const double tau_max = config.tau_max();
  if (meanfield_traj.populations() != config.population_count())
    throw std::invalid_argument("simulate_coupled_pair: mean-field trajectory population mismatch");
  if (meanfield_traj.history_len() * meanfield_traj.dt() < tau_max * (1.0 - 1e-12) ||
      meanfield_traj.steps() * meanfield_traj.dt() < grid.steps() * grid.dt - 1e-12)
    throw std::invalid_argument("simulate_coupled_pair: mean-field trajectory must cover the grid");

  SimBuffers b = prepare_buffers(realization, grid);

  // law-convolved mean-field activation, one value per (step, alpha, gamma)
  const int P = b.P;
  b.conv.assign(static_cast<std::size_t>(b.steps) * P * P, 0.0);
  for (int a = 0; a < P; ++a)
    for (int g = 0; g < P; ++g) {
      const auto quad = config.delay(a, g).quadrature(32);
      for (int n = 0; n < b.steps; ++n) {
        const double t = n * b.dt;
        double acc = 0.0;
        for (const auto& q : quad) {
          const double v = meanfield_traj.v_at(g, t - q.node);
          acc += q.weight * config.coupling_activation(meanfield_traj.mu_at(g, t - q.node),
                                                       v < 0.0 ? 0.0 : v);
        }
        b.conv[(static_cast<std::size_t>(n) * P + a) * P + g] = acc;
      }
    }

  TrajectorySet net = make_trajectory_set(b);
  TrajectorySet bar = make_trajectory_set(b);
  const auto x0 = initial_states(config, b, init, seed);
  fill_history(config, b, net, x0);
  std::copy(net.states.begin(), net.states.begin() + static_cast<std::size_t>(b.H + 1) * b.N,
            bar.states.begin());
  run_sim(config, b, seed, options, net, &bar);
  return {std::move(net), std::move(bar)};
}

PopulationMoments empirical_moments(const TrajectorySet& traj) {
  const int P = static_cast<int>(traj.pop_sizes.size());
  for (int p = 0; p < P; ++p)
    if (traj.pop_sizes[p] < 2)
      throw std::invalid_argument("empirical_moments: unbiased variance needs N_gamma >= 2");
  PopulationMoments m;
  m.dt = traj.dt;
  m.history_len = traj.history_len;
  m.steps = traj.steps;
  m.populations = P;
  m.mean.assign(static_cast<std::size_t>(m.rows()) * P, 0.0);
  m.var.assign(static_cast<std::size_t>(m.rows()) * P, 0.0);
  const int N = traj.neuron_count();
  for (int k = 0; k < m.rows(); ++k) {
    const double* row = traj.states.data() + static_cast<std::size_t>(k) * N;
    for (int p = 0; p < P; ++p) {
      const int lo = traj.pop_offsets[p], hi = traj.pop_offsets[p + 1];
      double s = 0.0;
      for (int i = lo; i < hi; ++i) s += row[i];
      const double mean = s / (hi - lo);
      double ss = 0.0;
      for (int i = lo; i < hi; ++i) {
        const double d = row[i] - mean;
        ss += d * d;
      }
      m.mean[static_cast<std::size_t>(k) * P + p] = mean;
      m.var[static_cast<std::size_t>(k) * P + p] = ss / (hi - lo - 1);
    }
  }
  return m;
}

std::vector<double> pairwise_correlation(const TrajectorySet& traj,
                                         const std::vector<std::pair<int, int>>& pairs) {
  const int N = traj.neuron_count();
  const int k0 = traj.history_len + traj.steps / 2;
  const int k1 = traj.history_len + traj.steps;
  const int n = k1 - k0 + 1;
  if (n < 2) throw std::invalid_argument("pairwise_correlation: horizon too short");

  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= N || j >= N)
      throw std::invalid_argument("pairwise_correlation: neuron index out of range");
    double mi = 0.0, mj = 0.0;
    for (int k = k0; k <= k1; ++k) {
      mi += traj.state(k, i);
      mj += traj.state(k, j);
    }
    mi /= n;
    mj /= n;
    double sii = 0.0, sjj = 0.0, sij = 0.0;
    for (int k = k0; k <= k1; ++k) {
      const double a = traj.state(k, i) - mi;
      const double c = traj.state(k, j) - mj;
      sii += a * a;
      sjj += c * c;
      sij += a * c;
    }
    if (sii <= 0.0 || sjj <= 0.0) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());  // degenerate flag
    } else if (i == j) {
      out.push_back(1.0);
    } else {
      out.push_back(sij / std::sqrt(sii * sjj));
    }
  }
  return out;
}

AgreementReport meanfield_vs_network(const ModelConfig& config, std::vector<int> pop_sizes,
                                     const Topology& topology, const ChaoticGaussian& init,
                                     const SimGrid& grid, std::uint64_t seed, double t1, double t2,
                                     const IntegrateOptions& mf_options) {
  const auto realization = build_realization(config, pop_sizes, topology, seed);
  const auto history = MomentHistory::constant(init.mu0, init.v0);
  const auto mf = integrate_moments(config, grid, history, mf_options);
  const auto net = simulate_network(config, realization, grid, init, seed);
  const auto emp = empirical_moments(net);

  const int P = config.population_count();
  const int k1 = static_cast<int>(std::ceil(t1 / grid.dt - 1e-9)) + grid.history_len;
  const int k2 = static_cast<int>(std::floor(t2 / grid.dt + 1e-9)) + grid.history_len;
  if (k1 < 0 || k2 <= k1 || k2 > grid.history_len + grid.steps())
    throw std::invalid_argument("meanfield_vs_network: window outside the horizon");

  AgreementReport rep;
  rep.window_start = t1;
  rep.window_end = t2;
  rep.l2_mu.assign(P, 0.0);
  rep.l2_v.assign(P, 0.0);
  for (int p = 0; p < P; ++p) {
    double acc_mu = 0.0, acc_v = 0.0;
    for (int k = k1; k <= k2; ++k) {
      const double dm = emp.mean_at(k, p) - mf.mu(p, k);
      const double dv = emp.var_at(k, p) - mf.v(p, k);
      acc_mu += dm * dm;
      acc_v += dv * dv;
    }
    rep.l2_mu[p] = std::sqrt(acc_mu / (k2 - k1 + 1));
    rep.l2_v[p] = std::sqrt(acc_v / (k2 - k1 + 1));
  }
  return rep;
}

}  // namespace delayfield
