#pragma once

#include <functional>
#include <vector>

#include "delayfield/model.hpp"

namespace delayfield {

struct MomentState {
  std::vector<double> mu;  // per population
  std::vector<double> v;   // per population, >= 0
};

/// Initial function on [-tau_max, 0]; constant histories cover every regime here.
struct MomentHistory {
  std::function<double(int pop, double t)> mu;
  std::function<double(int pop, double t)> v;

  static MomentHistory constant(std::vector<double> mu0, std::vector<double> v0);
};

/// Solution of the moment equations on a uniform grid covering [-tau_max, T].
/// Stores values and derivatives so delayed reads interpolate with cubic
/// Hermite segments (C^1 except at the t = 0 kink, which sits on a grid node).
class MomentTrajectory {
 public:
  MomentTrajectory(int populations, double dt, int history_len, int steps);

  int populations() const { return populations_; }
  double dt() const { return dt_; }
  int history_len() const { return history_len_; }
  int steps() const { return steps_; }
  int rows() const { return history_len_ + steps_ + 1; }
  double time(int k) const { return (k - history_len_) * dt_; }

  double mu(int pop, int k) const { return mu_[idx(pop, k)]; }
  double v(int pop, int k) const { return v_[idx(pop, k)]; }
  MomentState state(int k) const;

  /// Interpolated reads; t may exceed the last filled row by up to one step
  /// (cubic continuation), which the integrator needs for sub-step delays.
  double mu_at(int pop, double t) const;
  double v_at(int pop, double t) const;

  // integrator internals
  void set(int pop, int k, double mu, double v);
  void set_deriv(int pop, int k, double dmu, double dv);
  void set_history_end_deriv(int pop, double dmu, double dv);
  void set_filled(int k) { filled_ = k; }
  int filled() const { return filled_; }
  double dmu(int pop, int k) const { return dmu_[idx(pop, k)]; }
  double dv(int pop, int k) const { return dv_[idx(pop, k)]; }

 private:
  std::size_t idx(int pop, int k) const {
    return static_cast<std::size_t>(pop) * rows_ + static_cast<std::size_t>(k);
  }
  double interp(const std::vector<double>& val, const std::vector<double>& der,
                const std::vector<double>& der_hist_end, int pop, double t) const;

  int populations_;
  double dt_;
  int history_len_;
  int steps_;
  std::size_t rows_;
  int filled_ = 0;
  std::vector<double> mu_, v_, dmu_, dv_;
  std::vector<double> dmu_hist_end_, dv_hist_end_;  // history-side derivative at t = 0
};

struct IntegrateOptions {
  int quadrature_nodes = 32;
  double divergence_guard = 1e6;
};

/// 4th-order Runge-Kutta integration of
///   mu'_a = -mu_a/theta_a + sum_g Jbar_ag Conv_ag(t) + I_a
///   v'_a  = -2 v_a/theta_a + sum_g sigma_ag^2 Conv_ag(t)^2 + lambda_a^2
/// where Conv_ag(t) = int scale*f(mu_g(t-u), v_g(t-u)) d eta_ag(u) via delay
/// quadrature. Throws DivergenceError past the guard.
MomentTrajectory integrate_moments(const ModelConfig& config, const SimGrid& grid,
                                   const MomentHistory& history,
                                   const IntegrateOptions& options = {});

/// (mu*, v*) = (0, lambda^2 theta / 2) per population; requires the centered
/// sigmoid and zero input (throws std::domain_error otherwise). The returned
/// point satisfies the right-hand side to < 1e-12.
MomentState stationary_point(const ModelConfig& config);

struct Classification {
  enum class Kind { Stationary, Oscillatory, Inconclusive };
  Kind kind = Kind::Stationary;
  double pulsation = 0.0;  // 2 pi / mean inter-peak spacing
  double amplitude = 0.0;  // half peak-to-peak

  bool stationary() const { return kind == Kind::Stationary; }
  bool oscillatory() const { return kind == Kind::Oscillatory; }
};

inline constexpr double kOscillationThreshold = 1e-4;  // peak-to-peak on mu

/// Stationary if peak-to-peak of mu over [t1, t2] < 1e-4; otherwise Oscillatory
/// with pulsation from mean inter-peak spacing, or Inconclusive when the window
/// holds fewer than 3 putative periods.
Classification classify_trajectory(const MomentTrajectory& traj, int pop, double t1, double t2);

struct AgreementReport {
  std::vector<double> l2_mu;  // per population, RMS over the window
  std::vector<double> l2_v;
  double window_start = 0.0;
  double window_end = 0.0;
};

}  // namespace delayfield
