#include "procnet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "procnet/analytic.hpp"
#include "procnet/numeric.hpp"

namespace procnet {

std::string_view to_string(OptimumMethod method) {
  switch (method) {
    case OptimumMethod::CubicRoot: return "CubicRoot";
    case OptimumMethod::QuinticRoot: return "QuinticRoot";
    case OptimumMethod::ClosedFormExp: return "ClosedFormExp";
    case OptimumMethod::GoldenSection: return "GoldenSection";
    case OptimumMethod::RawTransmission: return "RawTransmission";
  }
  return "Unknown";
}

namespace {

constexpr int kMaxDoublings = 60;
constexpr std::size_t kPrescanPoints = 96;
constexpr std::size_t kQuinticScanPoints = 4000;
constexpr double kQuinticScanFloor = 1e-6;

NetworkConfig single_sensor(const ScalarSystem& system, PreprocessingKind kind, double b, double gamma) {
  NetworkConfig config;
  config.system = system;
  config.preprocessing = {kind, b, gamma};
  return config;
}

void require_positive(double value, const char* name, ErrorCode code) {
  if (!(value > 0.0) || !std::isfinite(value)) throw Error(code, std::string(name) + " must be finite and > 0");
}

double compression_of(const DelayLaw& law) {
  if (const auto* compressing = std::get_if<CompressingDelay>(&law)) return compressing->coeff;
  return 0.0;
}

/// Effective c in tau_tot = tau + c_eff / tau + const.
double effective_compression(const NetworkConfig& config, int sensors) {
  return compression_of(config.delays.comm) + sensors * compression_of(config.delays.fusion);
}

/// Sign of dP/dtau. The derivative factors as
///   e^{2a tau_tot} r (a + R)^2 [tau_tot'(tau) - rho(tau) / (2R)]
/// with R = sqrt(a^2 + sigma2_w / r) and rho = -d ln r / d tau; only the
/// bracket can change sign.
double stationarity(const NetworkConfig& config, int sensors, double tau) {
  const auto& system = config.system;
  const auto& model = config.preprocessing;
  const double r = measurement_noise_variance(model, tau) / sensors;
  const double root = std::hypot(system.a, std::sqrt(system.sigma2_w / r));
  double rho = 0.0;
  switch (model.kind) {
    case PreprocessingKind::InverseLinear: rho = 1.0 / tau; break;
    case PreprocessingKind::InversePower: rho = model.gamma / tau; break;
    case PreprocessingKind::Exponential: rho = model.gamma; break;
  }
  const double c_eff = effective_compression(config, sensors);
  return (1.0 - c_eff / (tau * tau)) - rho / (2.0 * root);
}

/// Golden section on tau -> P(tau) for a quasi-convex objective, with bracket
/// expansion, a coarse log prescan to pick the sub-bracket, and a final
/// bisection on the stationarity condition inside the prescan cell.
Optimum minimize_quasiconvex(const NetworkConfig& config, int sensors, double start_hi) {
  auto objective = [&](double tau) { return steady_state_error_variance(config, tau, sensors).total; };

  double hi = start_hi;
  int doublings = 0;
  while (!(objective(hi) >= objective(0.5 * hi))) {
    if (++doublings > kMaxDoublings) {
      throw Error(ErrorCode::BracketFailure,
                  "objective still decreasing at tau = " + std::to_string(hi) + " after doubling the bracket");
    }
    hi *= 2.0;
  }
  const double lo = std::min(kSearchFloor, 0.5 * hi);

  const auto grid = numeric::logspace(lo, hi, kPrescanPoints);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double value = objective(grid[i]);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  const double sub_lo = grid[best == 0 ? 0 : best - 1];
  const double sub_hi = grid[std::min(best + 1, grid.size() - 1)];

  auto golden = numeric::golden_section(objective, sub_lo, sub_hi, kTauTolerance);
  Optimum out;
  out.method = OptimumMethod::GoldenSection;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.tau_opt = golden.x;
  out.iterations = doublings + golden.iterations;

  // Value comparisons stall in the flat basin; the prescan cell brackets the
  // sign change of the slope, which bisection then resolves to the ulp.
  auto slope = [&](double tau) { return stationarity(config, sensors, tau); };
  if (slope(sub_lo) < 0.0 && slope(sub_hi) > 0.0) {
    const auto root = numeric::bisect(slope, sub_lo, sub_hi);
    out.tau_opt = root.root;
    out.iterations += root.iterations;
  }
  out.value = objective(out.tau_opt);
  return out;
}

double horner(const std::array<double, 6>& coefficients, double x) {
  double acc = 0.0;
  for (double c : coefficients) acc = acc * x + c;
  return acc;
}

struct QuinticScan {
  std::vector<double> grid;
  std::vector<numeric::RootResult> roots;
  std::vector<std::pair<double, double>> cells;
};

QuinticScan scan_quintic(double a, double s, double c) {
  const auto coefficients = quintic_coefficients(a, s, c);
  const double scale = std::max(std::sqrt(c), tau_upper_bound(a, s));
  QuinticScan scan;
  scan.grid = numeric::logspace(kQuinticScanFloor, 1e3 * scale, kQuinticScanPoints);
  auto poly = [&](double tau) { return horner(coefficients, tau); };
  double previous = poly(scan.grid.front());
  for (std::size_t i = 1; i < scan.grid.size(); ++i) {
    const double current = poly(scan.grid[i]);
    if (previous == 0.0) {
      // Exact zero at the previous node was recorded when it was `current`.
    } else if (current == 0.0 || (current < 0.0) != (previous < 0.0)) {
      scan.roots.push_back(numeric::bisect(poly, scan.grid[i - 1], scan.grid[i]));
      scan.cells.emplace_back(scan.grid[i - 1], scan.grid[i]);
    }
    previous = current;
  }
  return scan;
}

}  // namespace

double cubic_residual(double a, double s, double tau) {
  const double cubic = s * tau * tau * tau;
  const double quadratic = a * a * tau * tau;
  return (cubic + quadratic - 0.25) / (cubic + quadratic + 0.25);
}

std::array<double, 6> quintic_coefficients(double a, double s, double c) {
  const double a2 = a * a;
  return {s, a2, -2.0 * c * s, -(2.0 * a2 * c + 0.25), c * c * s, a2 * c * c};
}

std::vector<double> quintic_positive_roots(double a, double s, double c) {
  require_positive(s, "s", ErrorCode::NonPositiveNoise);
  require_positive(c, "c", ErrorCode::NegativeDelayParam);
  std::vector<double> out;
  for (const auto& root : scan_quintic(a, s, c).roots) out.push_back(root.root);
  return out;
}

Optimum optimal_tau_inverse_linear(const ScalarSystem& system, double b) {
  require_valid(system);
  require_positive(b, "b", ErrorCode::NonPositiveNoise);
  const double s = system.sigma2_w / b;
  const double a2 = system.a * system.a;
  const double upper = tau_upper_bound(system.a, s);
  // F(0) = -1/4 and F(upper) >= 0 by construction of the bound.
  auto cubic = [&](double tau) { return (s * tau + a2) * tau * tau - 0.25; };
  const auto root = numeric::bisect(cubic, 0.0, upper);

  Optimum out;
  out.method = OptimumMethod::CubicRoot;
  out.tau_opt = root.root;
  out.bracket_lo = 0.0;
  out.bracket_hi = upper;
  out.iterations = root.iterations;
  const auto config = single_sensor(system, PreprocessingKind::InverseLinear, b, 1.0);
  out.value = steady_state_error_variance(config, out.tau_opt, 1).total;
  return out;
}

Optimum optimal_tau_power(const ScalarSystem& system, double b, double gamma) {
  require_valid(system);
  require_positive(b, "b", ErrorCode::NonPositiveNoise);
  require_positive(gamma, "gamma", ErrorCode::InvalidArgument);
  const auto config = single_sensor(system, PreprocessingKind::InversePower, b, gamma);
  return minimize_quasiconvex(config, 1, 4.0 * tau_upper_bound(system.a, system.sigma2_w / b));
}

Optimum optimal_tau_exponential(const ScalarSystem& system, double b, double gamma) {
  require_valid(system);
  require_positive(b, "b", ErrorCode::NonPositiveNoise);
  require_positive(gamma, "gamma", ErrorCode::InvalidArgument);
  const auto config = single_sensor(system, PreprocessingKind::Exponential, b, gamma);
  const double s = system.sigma2_w / b;
  const double a2 = system.a * system.a;

  Optimum out;
  // dP/dtau has the sign of 1 - gamma / (2 sqrt(a^2 + s e^{gamma tau})), which
  // only ever crosses zero upwards, and does so at tau > 0 iff gamma^2/4 > a^2 + s.
  const double headroom = 0.25 * gamma * gamma - a2 - s;
  if (!(headroom > 0.0)) {
    out.method = OptimumMethod::RawTransmission;
    out.tau_opt = 0.0;
  } else {
    out.method = OptimumMethod::ClosedFormExp;
    out.tau_opt = std::log1p(headroom / s) / gamma;
  }
  out.bracket_lo = out.tau_opt;
  out.bracket_hi = out.tau_opt;
  out.value = steady_state_error_variance(config, out.tau_opt, 1).total;
  return out;
}

Optimum optimal_tau_with_compression(const ScalarSystem& system, double b, double c) {
  require_valid(system);
  require_positive(b, "b", ErrorCode::NonPositiveNoise);
  require_positive(c, "c", ErrorCode::NegativeDelayParam);
  const double s = system.sigma2_w / b;
  const auto scan = scan_quintic(system.a, s, c);
  if (scan.roots.empty()) {
    throw Error(ErrorCode::RootScanFailure, "no positive root of the stationarity quintic in the scan range");
  }

  auto config = single_sensor(system, PreprocessingKind::InverseLinear, b, 1.0);
  config.delays.comm = CompressingDelay{c};
  Optimum out;
  out.method = OptimumMethod::QuinticRoot;
  out.tau_opt = scan.roots.back().root;
  out.bracket_lo = scan.cells.back().first;
  out.bracket_hi = scan.cells.back().second;
  out.iterations = 0;
  for (const auto& root : scan.roots) out.iterations += root.iterations;
  out.value = steady_state_error_variance(config, out.tau_opt, 1).total;

  for (double tau : scan.grid) {
    const double value = steady_state_error_variance(config, tau, 1).total;
    if (value < out.value * (1.0 - 1e-12)) {
      throw Error(ErrorCode::RootScanFailure, "largest quintic root at tau = " + std::to_string(out.tau_opt) +
                                                  " is beaten by the scan point tau = " + std::to_string(tau));
    }
  }
  return out;
}

Optimum optimal_tau(const NetworkConfig& config, int sensors) {
  require_valid(config);
  if (sensors < 1 || sensors > config.sensors) {
    throw Error(ErrorCode::InvalidArgument, "sensor count " + std::to_string(sensors) + " outside 1.." +
                                                std::to_string(config.sensors));
  }
  // S sensors act as one sensor with noise b / S. Constant delays shift
  // tau_tot by a constant, which maps P affinely with a positive slope and so
  // leaves the argmin unchanged.
  const auto& system = config.system;
  const auto& model = config.preprocessing;
  const double b_eff = model.b / sensors;
  const double c_eff = effective_compression(config, sensors);

  Optimum out;
  if (c_eff > 0.0) {
    if (model.kind == PreprocessingKind::InverseLinear) {
      out = optimal_tau_with_compression(system, b_eff, c_eff);
    } else {
      const double start = 4.0 * std::max(tau_upper_bound(system.a, system.sigma2_w / b_eff), std::sqrt(c_eff));
      out = minimize_quasiconvex(config, sensors, start);
    }
  } else {
    switch (model.kind) {
      case PreprocessingKind::InverseLinear: out = optimal_tau_inverse_linear(system, b_eff); break;
      case PreprocessingKind::InversePower: out = optimal_tau_power(system, b_eff, model.gamma); break;
      case PreprocessingKind::Exponential: out = optimal_tau_exponential(system, b_eff, model.gamma); break;
    }
  }
  out.value = steady_state_error_variance(config, out.tau_opt, sensors).total;
  return out;
}

Sensitivity tau_opt_sensitivity(const ScalarSystem& system, double b) {
  const double tau = optimal_tau_inverse_linear(system, b).tau_opt;
  const double s = system.sigma2_w / b;
  const double denominator = 3.0 * s * tau + 2.0 * system.a * system.a;
  return {-tau * tau / denominator, -tau / denominator};
}

SensorCountResult optimal_sensor_count(const NetworkConfig& config, double tau) {
  require_valid(config);
  SensorCountResult out;
  out.table.reserve(static_cast<std::size_t>(config.sensors));
  out.value = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= config.sensors; ++s) {
    const double value = steady_state_error_variance(config, tau, s).total;
    out.table.emplace_back(s, value);
    if (value < out.value) {
      out.value = value;
      out.s_opt = s;
    }
  }
  const double tolerance = kTieTolerance * std::abs(out.value);
  double closest = std::numeric_limits<double>::infinity();
  for (const auto& [s, value] : out.table) {
    if (s == out.s_opt) continue;
    const double gap = std::abs(value - out.value);
    if (gap <= tolerance && gap < closest) {
      closest = gap;
      out.tie_with = s;
    }
  }
  return out;
}

JointOptimum joint_optimize(const NetworkConfig& config) {
  require_valid(config);
  JointOptimum out;
  out.per_sensor_count.reserve(static_cast<std::size_t>(config.sensors));
  for (int s = 1; s <= config.sensors; ++s) {
    out.per_sensor_count.emplace_back(s, optimal_tau(config, s));
  }
  out.optimum = out.per_sensor_count.front().second;
  for (const auto& [s, optimum] : out.per_sensor_count) {
    if (optimum.value < out.optimum.value) {
      out.optimum = optimum;
      out.s_opt = s;
    }
  }
  return out;
}

FusionNeglectDrop fusion_neglect_drop(const NetworkConfig& config, double tau) {
  auto without = config;
  without.delays.fusion = NoDelay{};
  const auto with_fusion = optimal_sensor_count(config, tau);
  const auto table_without = optimal_sensor_count(without, tau).table;

  FusionNeglectDrop out;
  out.s_opt = with_fusion.s_opt;
  out.sensors = config.sensors;
  const double p_with_opt = with_fusion.table[static_cast<std::size_t>(out.s_opt - 1)].second;
  const double p_without_opt = table_without[static_cast<std::size_t>(out.s_opt - 1)].second;
  const double p_with_all = with_fusion.table.back().second;
  const double p_without_all = table_without.back().second;
  out.at_s_opt_vs_with_fusion = (p_with_opt - p_without_opt) / p_with_opt;
  out.at_s_opt_vs_without_fusion = (p_with_opt - p_without_opt) / p_without_opt;
  out.at_all_vs_with_fusion = (p_with_all - p_without_all) / p_with_all;
  out.at_all_vs_without_fusion = (p_with_all - p_without_all) / p_without_all;
  return out;
}

std::optional<double> variance_crossing(const NetworkConfig& first, const NetworkConfig& second, int sensors,
                                        double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw Error(ErrorCode::InvalidArgument, "crossing scan needs 0 < lo < hi");
  auto difference = [&](double tau) {
    return steady_state_error_variance(first, tau, sensors).total -
           steady_state_error_variance(second, tau, sensors).total;
  };
  const auto grid = numeric::logspace(lo, hi, 2000);
  double previous = difference(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double current = difference(grid[i]);
    if (current == 0.0) return grid[i];
    if (std::isfinite(previous) && std::isfinite(current) && previous != 0.0 && (current < 0.0) != (previous < 0.0)) {
      return numeric::bisect(difference, grid[i - 1], grid[i]).root;
    }
    previous = current;
  }
  return std::nullopt;
}

double round_up_to_quantum(double tau, double quantum) {
  if (!(quantum > 0.0)) throw Error(ErrorCode::InvalidArgument, "quantum must be > 0");
  return std::ceil(tau / quantum) * quantum;
}

}  // namespace procnet
