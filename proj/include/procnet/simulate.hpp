#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "procnet/model.hpp"

namespace procnet {

struct SimPlan {
  double step = 1e-3;     ///< discretization step h
  double horizon = 100.0;
  double burn_in_fraction = 0.2;
  int trials = 64;
  std::uint64_t seed = 1;
  unsigned threads = 1;   ///< 0 picks hardware_concurrency
  /// Simulate the estimation-error recursion even for a <= 0. Unstable plants
  /// always use it because the raw state diverges.
  bool force_error_dynamics = false;
};

/// Exact zero-order discretization of the plant plus the sampled
/// measurement-noise variance r_d = meas_var / h.
struct DiscreteModel {
  double a_d = 1.0;
  double q_d = 0.0;
  double r_d = 0.0;
};

struct DiscreteFilter {
  double prior = 0.0;
  double posterior = 0.0;
  double gain = 0.0;
};

struct DelayRounding {
  long steps = 0;
  double residual = 0.0;  ///< |tau_tot - steps * h|, at most h / 2
};

struct SimResult {
  double empirical_variance = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double analytic_variance = 0.0;
  double z_score = 0.0;
  DelayRounding delay;
};

DiscreteModel discretize(const ScalarSystem& system, double meas_var, double h);

/// Fixed point of the discrete Riccati recursion for measurement variance r.
DiscreteFilter discrete_filter_steady_state(const DiscreteModel& model, double r);

DelayRounding round_delay(double tau_tot, double h);

/// Squared prediction errors x_k - xhat_{k|k-d} of one trial, in time order,
/// after burn-in. The stream depends only on (plan.seed, trial_index).
std::vector<double> run_trial(const NetworkConfig& config, double tau, int sensors, const SimPlan& plan,
                              std::uint64_t trial_index);

SimResult monte_carlo_variance(const NetworkConfig& config, double tau, int sensors, const SimPlan& plan);

}  // namespace procnet
