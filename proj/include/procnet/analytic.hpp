#pragma once

#include "procnet/model.hpp"

namespace procnet {

/// Inverse laws reject tau at or below this guard with NonPositiveTau.
inline constexpr double kTauFloor = 1e-300;

/// Below this |2 a d| the open-loop process-noise term uses its a -> 0 limit.
inline constexpr double kSmallExponent = 1e-12;

struct LimitPair {
  double at_zero = 0.0;      ///< may be +inf
  double at_infinity = 0.0;  ///< may be +inf
};

/// Per-sensor measurement-noise intensity after `tau` of preprocessing.
double measurement_noise_variance(const PreprocessingModel& model, double tau);

/// Steady-state Kalman-Bucy variance of dx = a x dt + dw observed with noise
/// intensity r: the positive root of 2 a p + sigma2_w - p^2 / r = 0.
double filter_steady_state_variance(const ScalarSystem& system, double r);

/// Variance after propagating an error of variance p open loop for d time
/// units: p e^{2ad} + sigma2_w (e^{2ad} - 1) / (2a).
double open_loop_projection(double p, const ScalarSystem& system, double d);

/// Process-noise part of open_loop_projection alone (the p = 0 case).
double process_noise_over(const ScalarSystem& system, double d);

/// Delay ledger for `sensors` sensors each preprocessing for `tau`.
DelayBreakdown total_delay(const NetworkConfig& config, double tau, int sensors);

/// Steady-state prediction-error variance of the fused estimate at the
/// current time when `sensors` sensors preprocess for `tau`. The S sensors
/// act as one virtual sensor with noise variance divided by S.
VarianceBreakdown steady_state_error_variance(const NetworkConfig& config, double tau, int sensors);

/// Limits of the variance as tau -> 0+ and tau -> +inf.
LimitPair variance_limits(const NetworkConfig& config, int sensors);

/// Upper bound on the cubic optimum for ratio s = sigma2_w / b.
double tau_upper_bound(double a, double s);

}  // namespace procnet
