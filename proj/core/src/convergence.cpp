#include "delayfield/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "delayfield/rng.hpp"

namespace delayfield {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t size_index, std::uint64_t trial) {
  const auto b = philox::block(seed, substream(NoiseKind::Trial, size_index, trial), 0);
  return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

// OLS slope with standard error on (log10 N, log10 err)
void fit_loglog(const std::vector<int>& sizes, const std::vector<double>& errors, double& slope,
                double& slope_se) {
  const std::size_t n = sizes.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log10(static_cast<double>(sizes[i]));
    y[i] = std::log10(errors[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    rss += r * r;
  }
  slope_se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
}

}  // namespace

ConvergenceReport coupling_experiment(const ModelConfig& config, std::span<const int> sizes,
                                      int trials, double T, double dt, std::uint64_t seed,
                                      const CouplingOptions& options) {
  config.validate();
  if (sizes.size() < 2) throw std::invalid_argument("coupling_experiment: need >= 2 sizes");
  if (trials < 4) throw std::invalid_argument("coupling_experiment: need >= 4 trials");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("coupling_experiment: sizes must be strictly increasing");
  const int P = config.population_count();
  if (static_cast<int>(options.pop_ratios.size()) != P)
    throw std::invalid_argument("coupling_experiment: pop_ratios length differs from populations");

  const SimGrid grid = make_grid(dt, T, config.tau_max());

  std::vector<double> mu0(P, options.init_mu0), v0(P);
  for (int p = 0; p < P; ++p) {
    const auto& pp = config.populations[p];
    v0[p] = options.init_v0.value_or(pp.lambda * pp.lambda * pp.theta / 2.0);
  }
  const ChaoticGaussian init{mu0, v0};

  IntegrateOptions mf_opts;
  mf_opts.quadrature_nodes = options.quadrature_nodes;
  const auto mf = integrate_moments(config, grid, MomentHistory::constant(mu0, v0), mf_opts);

  ConvergenceReport rep;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int base = sizes[si];
    std::vector<int> pop_sizes(P);
    int total = 0;
    for (int p = 0; p < P; ++p) {
      pop_sizes[p] = base * options.pop_ratios[p];
      total += pop_sizes[p];
    }

    std::vector<double> errs;
    int failed = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = trial_seed(seed, si, static_cast<std::uint64_t>(t));
      try {
        const auto realization = build_realization(config, pop_sizes, SampledDelays{}, ts);
        auto [net, bar] = simulate_coupled_pair(config, realization, grid, mf, init, ts);
        const int probes = std::min(options.probe_count, total);
        double worst = 0.0;
        for (int q = 0; q < probes; ++q) {
          const int i = static_cast<int>(static_cast<long long>(q) * total / probes);
          double sup = 0.0;
          for (int k = 0; k < net.rows(); ++k) {
            const double d = net.state(k, i) - bar.state(k, i);
            sup = std::max(sup, d * d);
          }
          worst = std::max(worst, sup);
        }
        errs.push_back(worst);
      } catch (const std::exception&) {
        ++failed;
      }
    }
    if (errs.empty()) throw std::runtime_error("coupling_experiment: all trials failed at one size");
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= errs.size();
    double varsum = 0.0;
    for (double e : errs) varsum += (e - mean) * (e - mean);
    const double se = errs.size() > 1
                          ? std::sqrt(varsum / (errs.size() - 1) / static_cast<double>(errs.size()))
                          : 0.0;
    rep.sizes.push_back(total);
    rep.errors.push_back(mean);
    rep.stderrs.push_back(se);
    rep.failures.push_back(failed);
    rep.per_trial.push_back(std::move(errs));
  }

  rep.exact_coupling =
      std::all_of(rep.errors.begin(), rep.errors.end(), [](double e) { return e == 0.0; });
  if (rep.exact_coupling) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.slope_stderr = std::numeric_limits<double>::quiet_NaN();
  } else {
    fit_loglog(rep.sizes, rep.errors, rep.slope, rep.slope_stderr);
  }
  return rep;
}

DecorrelationReport chaos_decorrelation(const ModelConfig& config, std::span<const int> sizes,
                                        int trials, std::uint64_t seed,
                                        const DecorrelationOptions& options) {
  config.validate();
  if (sizes.size() < 2) throw std::invalid_argument("chaos_decorrelation: need >= 2 sizes");
  if (trials < 1) throw std::invalid_argument("chaos_decorrelation: need >= 1 trial");
  const int P = config.population_count();
  const SimGrid grid = make_grid(options.dt, options.T, config.tau_max());

  std::vector<double> mu0(P, options.init_mu0), v0(P);
  for (int p = 0; p < P; ++p) {
    const auto& pp = config.populations[p];
    v0[p] = pp.lambda * pp.lambda * pp.theta / 2.0;
  }

  DecorrelationReport rep;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    std::vector<int> pop_sizes(P, n / P);
    pop_sizes[0] += n - (n / P) * P;
    std::vector<double> trial_means;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = trial_seed(seed, si, static_cast<std::uint64_t>(t));
      const auto realization = build_realization(config, pop_sizes, SampledDelays{}, ts);
      const bool deterministic = [&] {
        bool all_zero = true;
        for (const auto& pp : config.populations) all_zero = all_zero && pp.lambda == 0.0;
        for (double s : config.connectivity.sigma) all_zero = all_zero && s == 0.0;
        return all_zero;
      }();
      const InitialCondition init =
          deterministic ? InitialCondition{FrozenHistory{options.init_mu0}}
                        : InitialCondition{ChaoticGaussian{mu0, v0}};
      const auto traj = simulate_network(config, realization, grid, init, ts);

      CounterRng pair_rng(ts, substream(NoiseKind::Generic, 0));
      std::vector<std::pair<int, int>> pairs;
      while (static_cast<int>(pairs.size()) < options.pair_count) {
        const int i = static_cast<int>(pair_rng.uniform() * n) % n;
        const int j = static_cast<int>(pair_rng.uniform() * n) % n;
        if (i != j) pairs.emplace_back(i, j);
      }
      const auto corr = pairwise_correlation(traj, pairs);
      double acc = 0.0;
      int counted = 0;
      for (std::size_t c = 0; c < corr.size(); ++c) {
        // identical series are degenerate-perfect regardless of their variance
        bool identical = true;
        for (int k = 0; k < traj.rows() && identical; ++k)
          identical = traj.state(k, pairs[c].first) == traj.state(k, pairs[c].second);
        if (identical) {
          acc += 1.0;
          ++counted;
          ++rep.degenerate_pairs;
          continue;
        }
        if (std::isnan(corr[c])) continue;  // zero variance against a distinct series
        acc += std::abs(corr[c]);
        ++counted;
      }
      trial_means.push_back(counted > 0 ? acc / counted : 0.0);
    }
    double mean = 0.0;
    for (double m : trial_means) mean += m;
    rep.sizes.push_back(n);
    rep.mean_abs_corr.push_back(mean / trial_means.size());
    rep.per_trial.push_back(std::move(trial_means));
  }
  rep.degenerate = rep.degenerate_pairs > 0;
  return rep;
}

}  // namespace delayfield
