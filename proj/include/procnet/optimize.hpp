#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "procnet/model.hpp"

namespace procnet {

inline constexpr double kRootResidualTolerance = 1e-12;
inline constexpr double kTauTolerance = 1e-10;
inline constexpr double kTieTolerance = 1e-12;

/// Lower end of every golden-section bracket.
inline constexpr double kSearchFloor = 1e-9;

enum class OptimumMethod { CubicRoot, QuinticRoot, ClosedFormExp, GoldenSection, RawTransmission };

std::string_view to_string(OptimumMethod method);

struct Optimum {
  double tau_opt = 0.0;
  double value = 0.0;  ///< variance at tau_opt
  OptimumMethod method = OptimumMethod::GoldenSection;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

struct SensorCountResult {
  int s_opt = 1;
  double value = 0.0;
  std::optional<int> tie_with;
  std::vector<std::pair<int, double>> table;  ///< (S, P(S)) for S = 1..N
};

struct JointOptimum {
  int s_opt = 1;
  Optimum optimum;
  std::vector<std::pair<int, Optimum>> per_sensor_count;  ///< ordered by S
};

struct Sensitivity {
  double dtau_ds = 0.0;
  double dtau_da2 = 0.0;
};

/// Relative variance increase caused by ignoring fusion delay, at the
/// optimal sensor count and with every sensor in use. Each drop is given
/// normalized by the with-fusion variance and by the fusion-free variance.
struct FusionNeglectDrop {
  int s_opt = 1;
  int sensors = 1;
  double at_s_opt_vs_with_fusion = 0.0;
  double at_s_opt_vs_without_fusion = 0.0;
  double at_all_vs_with_fusion = 0.0;
  double at_all_vs_without_fusion = 0.0;
};

/// F(tau) = s tau^3 + a^2 tau^2 - 1/4 divided by the sum of its term
/// magnitudes, so it is dimensionless and bounded by 1.
double cubic_residual(double a, double s, double tau);

/// Stationarity polynomial of the compressing-delay objective, highest
/// degree first: s t^5 + a^2 t^4 - 2cs t^3 - (2a^2 c + 1/4) t^2 + c^2 s t + a^2 c^2.
std::array<double, 6> quintic_coefficients(double a, double s, double c);

/// Every positive root of the quintic found by a log-spaced sign-change scan
/// followed by bisection, in increasing order.
std::vector<double> quintic_positive_roots(double a, double s, double c);

/// Single sensor, no delays, noise b / tau: unique positive root of the cubic.
Optimum optimal_tau_inverse_linear(const ScalarSystem& system, double b);

/// Single sensor, no delays, noise b / tau^gamma.
Optimum optimal_tau_power(const ScalarSystem& system, double b, double gamma);

/// Single sensor, no delays, noise b e^{-gamma tau}. Returns RawTransmission
/// (tau_opt = 0) unless gamma > 2 sqrt(sigma2_w / b + a^2).
Optimum optimal_tau_exponential(const ScalarSystem& system, double b, double gamma);

/// Single sensor, noise b / tau, communication delay c / tau.
Optimum optimal_tau_with_compression(const ScalarSystem& system, double b, double c);

/// Minimizes steady_state_error_variance(config, tau, sensors) over tau,
/// routing to the specialized solvers when the model combination allows it.
Optimum optimal_tau(const NetworkConfig& config, int sensors);

/// d tau_opt / ds and d tau_opt / d(a^2) for the inverse-linear law, s = sigma2_w / b.
Sensitivity tau_opt_sensitivity(const ScalarSystem& system, double b);

SensorCountResult optimal_sensor_count(const NetworkConfig& config, double tau);

/// Best (S, tau) pair over S = 1..N; ties go to the smaller S.
JointOptimum joint_optimize(const NetworkConfig& config);

FusionNeglectDrop fusion_neglect_drop(const NetworkConfig& config, double tau);

/// First tau in [lo, hi] where the variance curves of two configs cross,
/// located on a log-spaced scan and refined by bisection on their difference.
std::optional<double> variance_crossing(const NetworkConfig& first, const NetworkConfig& second, int sensors,
                                        double lo, double hi);

/// The objective is steeper left of the optimum, so a quantized delay should
/// be rounded up.
double round_up_to_quantum(double tau, double quantum);

}  // namespace procnet
