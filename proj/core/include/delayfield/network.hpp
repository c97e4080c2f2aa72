#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "delayfield/meanfield.hpp"
#include "delayfield/model.hpp"

namespace delayfield {

struct SampledDelays {};
struct IntervalPositions {
  double a;
  double tau_s;
};
using Topology = std::variant<SampledDelays, IntervalPositions>;

/// Quenched draw of neuron-to-population assignment and pairwise delays.
/// Delays are addressed lazily through counter-based substreams keyed by the
/// master seed, so no N x N matrix is materialized: tau_ij is a pure function
/// of (seed, i, j) (sampled rows) or of the stored positions (|r_i - r_j| + tau_s).
class NetworkRealization {
 public:
  NetworkRealization(const ModelConfig& config, std::vector<int> pop_sizes,
                     std::optional<std::vector<double>> positions, double position_tau_s,
                     std::uint64_t master_seed);

  int neuron_count() const { return total_; }
  int population_count() const { return static_cast<int>(pop_sizes_.size()); }
  const std::vector<int>& pop_sizes() const { return pop_sizes_; }
  /// Contiguous assignment: population p spans [pop_offset(p), pop_offset(p+1)).
  int pop_offset(int p) const { return offsets_[p]; }
  int population_of(int i) const;
  double delay(int i, int j) const;
  const std::optional<std::vector<double>>& positions() const { return positions_; }
  std::uint64_t master_seed() const { return seed_; }
  const DelayLaw& law(int a, int g) const {
    return laws_[static_cast<std::size_t>(a) * pop_sizes_.size() + g];
  }

 private:
  std::vector<int> pop_sizes_;
  std::vector<int> offsets_;  // size P+1
  std::vector<DelayLaw> laws_;
  std::optional<std::vector<double>> positions_;
  double position_tau_s_ = 0.0;
  std::uint64_t seed_ = 0;
  int total_ = 0;
};

/// Samples delays i.i.d. per row from eta_{p(i) gamma} (SampledDelays) or from
/// i.i.d. uniform positions on [0, a] (IntervalPositions, which requires every
/// config law to be the matching IntervalAveraged(a, tau_s)).
NetworkRealization build_realization(const ModelConfig& config, std::vector<int> pop_sizes,
                                     const Topology& topology, std::uint64_t seed);

/// i.i.d. Gaussian constant histories per neuron (per-population mean/variance).
struct ChaoticGaussian {
  std::vector<double> mu0;
  std::vector<double> v0;
};
/// Every neuron held at the same constant.
struct FrozenHistory {
  double value;
};
using InitialCondition = std::variant<ChaoticGaussian, FrozenHistory>;

/// Per-neuron paths on the grid [-tau_max, T], time-major storage.
struct TrajectorySet {
  double dt = 0.0;
  int history_len = 0;
  int steps = 0;
  std::vector<int> pop_sizes;
  std::vector<int> pop_offsets;  // size P+1
  std::vector<double> states;    // rows() x N

  int neuron_count() const { return pop_offsets.back(); }
  int rows() const { return history_len + steps + 1; }
  double time(int k) const { return (k - history_len) * dt; }
  double state(int k, int i) const {
    return states[static_cast<std::size_t>(k) * neuron_count() + i];
  }
  int population_of(int i) const;
};

struct SimOptions {
  double divergence_guard = 1e6;
  /// Number of finer-grid noise increments aggregated per step (strong
  /// refinement studies share one Brownian path across dt levels).
  int noise_substeps = 1;
};

/// Euler-Maruyama integration of the delayed network SDE under the firing-rate
/// coupling; delayed states are read at the nearest grid point. Requires
/// dt <= tau_min / 10 when tau_min > 0. Throws DivergenceError past the guard.
TrajectorySet simulate_network(const ModelConfig& config, const NetworkRealization& realization,
                               const SimGrid& grid, const InitialCondition& init,
                               std::uint64_t seed, const SimOptions& options = {});

/// Network and mean-field particles driven by identical noise increments and
/// initial histories; the particles' coupling uses the precomputed moment
/// trajectory (law of the limit process) instead of empirical sums.
std::pair<TrajectorySet, TrajectorySet> simulate_coupled_pair(
    const ModelConfig& config, const NetworkRealization& realization, const SimGrid& grid,
    const MomentTrajectory& meanfield_traj, const InitialCondition& init, std::uint64_t seed,
    const SimOptions& options = {});

/// Cross-sectional mean and unbiased variance per population per time step.
struct PopulationMoments {
  double dt = 0.0;
  int history_len = 0;
  int steps = 0;
  int populations = 0;
  std::vector<double> mean;  // rows() x P
  std::vector<double> var;

  int rows() const { return history_len + steps + 1; }
  double time(int k) const { return (k - history_len) * dt; }
  double mean_at(int k, int p) const { return mean[static_cast<std::size_t>(k) * populations + p]; }
  double var_at(int k, int p) const { return var[static_cast<std::size_t>(k) * populations + p]; }
};

/// Requires N_gamma >= 2 (unbiased variance undefined otherwise).
PopulationMoments empirical_moments(const TrajectorySet& traj);

/// Pearson correlation of the two neurons' series over the second half of the
/// horizon; degenerate zero-variance series yield NaN.
std::vector<double> pairwise_correlation(const TrajectorySet& traj,
                                         const std::vector<std::pair<int, int>>& pairs);

/// Runs both simulators on the same grid and reports per-population RMS
/// distances of (mu, v) vs the empirical moments over [t1, t2].
AgreementReport meanfield_vs_network(const ModelConfig& config, std::vector<int> pop_sizes,
                                     const Topology& topology, const ChaoticGaussian& init,
                                     const SimGrid& grid, std::uint64_t seed, double t1, double t2,
                                     const IntegrateOptions& mf_options = {});

}  // namespace delayfield
