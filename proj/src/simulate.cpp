#include "procnet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "procnet/analytic.hpp"
#include "procnet/numeric.hpp"

namespace procnet {

namespace {

constexpr std::size_t kMinSamples = 100;
constexpr std::size_t kSingleTrialBatches = 20;
constexpr double kHorizonFactor = 20.0;

struct TrialLayout {
  DiscreteModel model;
  DiscreteFilter filter;
  double r_filter = 0.0;  ///< variance of the fused (averaged) measurement
  DelayRounding delay;
  long steps = 0;
  long first_recorded = 0;
  bool error_dynamics = false;
};

std::size_t recorded_count(const TrialLayout& layout) {
  return static_cast<std::size_t>(layout.steps - layout.first_recorded + 1);
}

TrialLayout plan_trial(const NetworkConfig& config, double tau, int sensors, const SimPlan& plan) {
  require_valid(config);
  if (!(plan.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation step must be > 0");
  if (!(plan.burn_in_fraction > 0.0 && plan.burn_in_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "burn-in fraction must lie in (0, 1)");
  }
  if (plan.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");

  const auto delays = total_delay(config, tau, sensors);
  const auto& system = config.system;
  const double mixing = system.a < 0.0 ? 1.0 / std::abs(system.a) : 1.0;
  const double required = kHorizonFactor * std::max(mixing, delays.tau_tot);
  if (!(plan.horizon >= required)) {
    throw Error(ErrorCode::HorizonTooShort, "horizon " + std::to_string(plan.horizon) + " below " +
                                                std::to_string(required) + " (20 x max(correlation time, delay))");
  }

  TrialLayout layout;
  const double meas_var = measurement_noise_variance(config.preprocessing, tau);
  layout.model = discretize(system, meas_var, plan.step);
  layout.r_filter = layout.model.r_d / sensors;
  layout.filter = discrete_filter_steady_state(layout.model, layout.r_filter);
  layout.delay = round_delay(delays.tau_tot, plan.step);
  layout.steps = std::lround(plan.horizon / plan.step);
  const long burn = static_cast<long>(std::ceil(plan.burn_in_fraction * static_cast<double>(layout.steps)));
  layout.first_recorded = std::max({burn, layout.delay.steps, 1L});
  if (layout.steps < layout.first_recorded || recorded_count(layout) < kMinSamples) {
    throw Error(ErrorCode::HorizonTooShort, "fewer than 100 samples remain after burn-in");
  }
  layout.error_dynamics = plan.force_error_dynamics || system.a > 0.0;
  return layout;
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial_index) {
  std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(trial_index >> 32),
                         0x70726f63u};
  return std::mt19937_64(sequence);
}

/// Drives one trial and hands every recorded squared error to `sink`. Both
/// recursions draw their noise in the same order (initial error, then per
/// step the process noise followed by one draw per sensor), so for a <= 0
/// they realize the same sample path.
template <typename Sink>
void simulate_trial(const NetworkConfig& config, int sensors, const TrialLayout& layout, const SimPlan& plan,
                    std::uint64_t trial_index, Sink&& sink) {
  auto engine = trial_engine(plan.seed, trial_index);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto& system = config.system;
  const double a_d = layout.model.a_d;
  const double process_sd = std::sqrt(layout.model.q_d);
  const double sensor_sd = std::sqrt(layout.model.r_d);
  const double gain = layout.filter.gain;
  const long d = layout.delay.steps;
  const double a_d_pow = std::pow(a_d, static_cast<double>(d));
  const auto ring = static_cast<std::size_t>(d + 1);

  auto fused_noise = [&] {
    double sum = 0.0;
    for (int i = 0; i < sensors; ++i) sum += sensor_sd * normal(engine);
    return sum / sensors;
  };

  const double initial_error = std::sqrt(system.p0) * normal(engine);

  if (!layout.error_dynamics) {
    std::vector<double> estimates(ring, system.mu0);
    double x = system.mu0 + initial_error;
    double estimate = system.mu0;
    for (long k = 1; k <= layout.steps; ++k) {
      x = a_d * x + process_sd * normal(engine);
      const double y = x + fused_noise();
      estimate = a_d * estimate;
      estimate += gain * (y - estimate);
      estimates[static_cast<std::size_t>(k) % ring] = estimate;
      if (k >= layout.first_recorded) {
        const double error = x - a_d_pow * estimates[static_cast<std::size_t>(k - d) % ring];
        sink(error * error);
      }
    }
    return;
  }

  // Prediction error = a_d^d e_{k-d} + sum_{j<d} a_d^j w_{k-j}.
  std::vector<double> errors(ring, 0.0);
  std::vector<double> noises(static_cast<std::size_t>(std::max(d, 1L)), 0.0);
  errors[0] = initial_error;
  double error = initial_error;
  double window = 0.0;
  for (long k = 1; k <= layout.steps; ++k) {
    const double w = process_sd * normal(engine);
    const double prior = a_d * error + w;
    error = (1.0 - gain) * prior - gain * fused_noise();
    errors[static_cast<std::size_t>(k) % ring] = error;
    if (d > 0) {
      const std::size_t slot = static_cast<std::size_t>(k % d);
      const double leaving = noises[slot];
      noises[slot] = w;
      if (k % d == 0) {
        // Exact recomputation each window keeps the recursive update from
        // accumulating rounding error when a_d > 1.
        window = 0.0;
        double power = 1.0;
        for (long j = 0; j < d && k - j >= 1; ++j) {
          window += power * noises[static_cast<std::size_t>((k - j) % d)];
          power *= a_d;
        }
      } else {
        window = a_d * window + w - a_d_pow * leaving;
      }
    }
    if (k >= layout.first_recorded) {
      const double predicted = a_d_pow * errors[static_cast<std::size_t>(k - d) % ring] + window;
      sink(predicted * predicted);
    }
  }
}

struct TrialSummary {
  double sum = 0.0;
  std::size_t count = 0;
  std::vector<double> batch_means;  ///< only filled for single-trial plans
};

}  // namespace

DiscreteModel discretize(const ScalarSystem& system, double meas_var, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "discretization step must be > 0");
  if (!(meas_var > 0.0)) throw Error(ErrorCode::NonPositiveNoise, "measurement variance must be > 0");
  DiscreteModel out;
  out.a_d = std::exp(system.a * h);
  out.q_d = process_noise_over(system, h);
  out.r_d = meas_var / h;
  return out;
}

DiscreteFilter discrete_filter_steady_state(const DiscreteModel& model, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveNoise, "measurement variance must be > 0");
  const double a2 = model.a_d * model.a_d;
  const double q = model.q_d;
  // Prior P solves P^2 + B P - q r = 0 with B = r (1 - a_d^2) - q.
  const double linear = r * (1.0 - a2) - q;
  const double disc = std::sqrt(linear * linear + 4.0 * q * r);
  double prior = linear > 0.0 ? 2.0 * q * r / (linear + disc) : 0.5 * (disc - linear);
  for (int i = 0; i < 200; ++i) {
    const double next = a2 * prior * r / (prior + r) + q;
    const double change = std::abs(next - prior);
    prior = next;
    if (change <= 1e-14 * prior) break;
  }
  DiscreteFilter out;
  out.prior = prior;
  out.gain = prior / (prior + r);
  out.posterior = prior * r / (prior + r);
  return out;
}

DelayRounding round_delay(double tau_tot, double h) {
  DelayRounding out;
  out.steps = std::lround(tau_tot / h);
  out.residual = std::abs(tau_tot - static_cast<double>(out.steps) * h);
  return out;
}

std::vector<double> run_trial(const NetworkConfig& config, double tau, int sensors, const SimPlan& plan,
                              std::uint64_t trial_index) {
  const auto layout = plan_trial(config, tau, sensors, plan);
  std::vector<double> out;
  out.reserve(recorded_count(layout));
  simulate_trial(config, sensors, layout, plan, trial_index, [&](double v) { out.push_back(v); });
  return out;
}

SimResult monte_carlo_variance(const NetworkConfig& config, double tau, int sensors, const SimPlan& plan) {
  const auto layout = plan_trial(config, tau, sensors, plan);
  const auto trials = static_cast<std::size_t>(plan.trials);
  const std::size_t per_trial = recorded_count(layout);
  std::vector<TrialSummary> summaries(trials);

  auto run_one = [&](std::size_t trial) {
    numeric::CompensatedSum total;
    TrialSummary& summary = summaries[trial];
    if (trials == 1) {
      const std::size_t batch_size = per_trial / kSingleTrialBatches;
      numeric::CompensatedSum batch;
      std::size_t in_batch = 0;
      simulate_trial(config, sensors, layout, plan, trial, [&](double v) {
        total.add(v);
        ++summary.count;
        if (summary.batch_means.size() < kSingleTrialBatches) {
          batch.add(v);
          if (++in_batch == batch_size) {
            summary.batch_means.push_back(batch.value() / static_cast<double>(batch_size));
            batch = {};
            in_batch = 0;
          }
        }
      });
    } else {
      simulate_trial(config, sensors, layout, plan, trial, [&](double v) {
        total.add(v);
        ++summary.count;
      });
    }
    summary.sum = total.value();
  };

  unsigned workers = plan.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : plan.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) run_one(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < trials; t += workers) run_one(t);
      });
    }
    for (auto& thread : pool) thread.join();
  }

  // Merge in trial order so the result is independent of scheduling.
  numeric::CompensatedSum grand;
  std::size_t samples = 0;
  std::vector<double> batches;
  for (const auto& summary : summaries) {
    grand.add(summary.sum);
    samples += summary.count;
    if (trials > 1) batches.push_back(summary.sum / static_cast<double>(summary.count));
  }
  if (trials == 1) batches = summaries.front().batch_means;

  SimResult out;
  out.samples = samples;
  out.delay = layout.delay;
  out.empirical_variance = grand.value() / static_cast<double>(samples);
  numeric::CompensatedSum batch_sum;
  for (double m : batches) batch_sum.add(m);
  const double batch_mean = batch_sum.value() / static_cast<double>(batches.size());
  numeric::CompensatedSum spread;
  for (double m : batches) spread.add((m - batch_mean) * (m - batch_mean));
  const double nb = static_cast<double>(batches.size());
  out.std_error = std::sqrt(spread.value() / (nb - 1.0) / nb);
  out.analytic_variance = steady_state_error_variance(config, tau, sensors).total;
  out.z_score = (out.empirical_variance - out.analytic_variance) / out.std_error;
  return out;
}

}  // namespace procnet
