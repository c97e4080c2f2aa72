#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "delayfield/network.hpp"

namespace delayfield {

struct ConvergenceReport {
  std::vector<int> sizes;        // total N per point, strictly increasing
  std::vector<double> errors;    // mean over trials of max-probe sup_t |X - Xbar|^2
  std::vector<double> stderrs;   // standard error over trials
  std::vector<int> failures;     // per-size failed trials (divergence etc.)
  std::vector<std::vector<double>> per_trial;
  double slope = 0.0;            // OLS fit of log error vs log N
  double slope_stderr = 0.0;
  bool exact_coupling = false;   // all errors identically zero (J = sigma = 0)
};

struct CouplingOptions {
  int probe_count = 16;
  std::vector<int> pop_ratios = {1};  // pop_sizes = ratio * N
  double init_mu0 = 0.3;              // chaotic init mean, all populations
  std::optional<double> init_v0;      // default: the stationary variance
  int quadrature_nodes = 32;
};

/// For each N: averages over trials (fresh delay realization and noise each,
/// mean-field trajectory computed once) the max over a probe set of neurons of
/// sup_t |X^i - Xbar^i|^2, then fits the log-log slope.
ConvergenceReport coupling_experiment(const ModelConfig& config, std::span<const int> sizes,
                                      int trials, double T, double dt, std::uint64_t seed,
                                      const CouplingOptions& options = {});

struct DecorrelationReport {
  std::vector<int> sizes;
  std::vector<double> mean_abs_corr;
  std::vector<std::vector<double>> per_trial;
  int degenerate_pairs = 0;  // identical zero-variance series, counted as corr 1
  bool degenerate = false;
};

struct DecorrelationOptions {
  int pair_count = 32;
  double T = 60.0;
  double dt = 2e-3;
  double init_mu0 = 0.3;
};

/// Mean absolute Pearson correlation over random distinct pairs on the
/// post-transient (second-half) window; expected to decrease with N.
DecorrelationReport chaos_decorrelation(const ModelConfig& config, std::span<const int> sizes,
                                        int trials, std::uint64_t seed,
                                        const DecorrelationOptions& options = {});

}  // namespace delayfield
