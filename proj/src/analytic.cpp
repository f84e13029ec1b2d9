#include "procnet/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace procnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_compressing(const DelayLaw& law) { return std::holds_alternative<CompressingDelay>(law); }

double delay_value(const DelayLaw& law, double tau) {
  if (const auto* constant = std::get_if<ConstantDelay>(&law)) return constant->value;
  if (const auto* compressing = std::get_if<CompressingDelay>(&law)) return compressing->coeff / tau;
  return 0.0;
}

void require_tau(bool ok, double tau, const char* what) {
  if (!ok) throw Error(ErrorCode::NonPositiveTau, std::string(what) + " at tau = " + std::to_string(tau));
}

void require_sensor_count(const NetworkConfig& config, int sensors) {
  if (sensors < 1 || sensors > config.sensors) {
    throw Error(ErrorCode::InvalidArgument, "sensor count " + std::to_string(sensors) + " outside 1.." +
                                                std::to_string(config.sensors));
  }
}

}  // namespace

double measurement_noise_variance(const PreprocessingModel& model, double tau) {
  switch (model.kind) {
    case PreprocessingKind::InverseLinear:
      require_tau(tau > kTauFloor, tau, "inverse-linear noise law");
      return model.b / tau;
    case PreprocessingKind::InversePower:
      require_tau(tau > kTauFloor, tau, "inverse-power noise law");
      return model.b / std::pow(tau, model.gamma);
    case PreprocessingKind::Exponential:
      require_tau(tau >= 0.0, tau, "exponential noise law");
      return model.b * std::exp(-model.gamma * tau);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown preprocessing kind");
}

double filter_steady_state_variance(const ScalarSystem& system, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveNoise, "measurement intensity r must be > 0");
  if (!(system.sigma2_w > 0.0)) throw Error(ErrorCode::NonPositiveNoise, "sigma2_w must be > 0");
  const double root = std::hypot(system.a, std::sqrt(system.sigma2_w / r));
  // a + root cancels for a < 0; use the conjugate form there.
  if (system.a < 0.0) return system.sigma2_w / (root - system.a);
  return r * (system.a + root);
}

double process_noise_over(const ScalarSystem& system, double d) {
  const double exponent = 2.0 * system.a * d;
  if (std::abs(exponent) < kSmallExponent) return system.sigma2_w * d;
  return system.sigma2_w * std::expm1(exponent) / (2.0 * system.a);
}

double open_loop_projection(double p, const ScalarSystem& system, double d) {
  if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "projection horizon must be >= 0");
  const double noise = process_noise_over(system, d);
  if (p == 0.0) return noise;
  return p * std::exp(2.0 * system.a * d) + noise;
}

DelayBreakdown total_delay(const NetworkConfig& config, double tau, int sensors) {
  require_sensor_count(config, sensors);
  require_tau(tau >= 0.0, tau, "preprocessing delay");
  if (has_compressing(config.delays.comm) || has_compressing(config.delays.fusion)) {
    require_tau(tau > kTauFloor, tau, "compressing delay law");
  }
  DelayBreakdown out;
  out.tau_p = tau;
  out.tau_c = delay_value(config.delays.comm, tau);
  out.tau_s = out.tau_p + out.tau_c;
  out.tau_f_tot = sensors * delay_value(config.delays.fusion, tau);
  out.tau_tot = out.tau_s + out.tau_f_tot;
  return out;
}

VarianceBreakdown steady_state_error_variance(const NetworkConfig& config, double tau, int sensors) {
  require_valid(config);
  VarianceBreakdown out;
  out.delays = total_delay(config, tau, sensors);
  const double r = measurement_noise_variance(config.preprocessing, tau) / sensors;
  // r underflows to zero only for the exponential law at very long delays,
  // where the filter variance tends to zero.
  const double p = r > 0.0 ? filter_steady_state_variance(config.system, r) : 0.0;
  const double tau_tot = out.delays.tau_tot;
  out.estimation_part = p == 0.0 ? 0.0 : p * std::exp(2.0 * config.system.a * tau_tot);
  out.noise_part = process_noise_over(config.system, tau_tot);
  out.total = out.estimation_part + out.noise_part;
  return out;
}

LimitPair variance_limits(const NetworkConfig& config, int sensors) {
  require_valid(config);
  require_sensor_count(config, sensors);
  const auto& system = config.system;
  const double limit = system.a < 0.0 ? system.sigma2_w / (2.0 * std::abs(system.a)) : kInf;
  LimitPair out{limit, limit};
  const bool finite_noise_at_zero = config.preprocessing.kind == PreprocessingKind::Exponential &&
                                    !has_compressing(config.delays.comm) &&
                                    !has_compressing(config.delays.fusion);
  if (finite_noise_at_zero) {
    out.at_zero = steady_state_error_variance(config, 0.0, sensors).total;
  }
  return out;
}

double tau_upper_bound(double a, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise ratio s must be > 0");
  const double magnitude = std::abs(a);
  if (magnitude > std::cbrt(s / 2.0)) return 1.0 / (2.0 * magnitude);
  return std::cbrt(1.0 / (4.0 * s));
}

}  // namespace procnet
