// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from oracle.hpp, never from the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "oracle.hpp"
#include "procnet/analytic.hpp"
#include "procnet/config_io.hpp"
#include "procnet/numeric.hpp"
#include "procnet/optimize.hpp"
#include "procnet/simulate.hpp"

using namespace procnet;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// (0, hi] drawn as hi - U[0, hi) so zero is excluded.
double positive_upto(std::mt19937_64& rng, double hi) { return hi - oracle::uniform(rng, 0.0, hi); }

oracle::Params plain(double a, double sigma2, double b) {
  oracle::Params p;
  p.a = a;
  p.sigma2 = sigma2;
  p.b = b;
  return p;
}

NetworkConfig config_of(double a, double sigma2, double b) {
  NetworkConfig config;
  config.system.a = a;
  config.system.sigma2_w = sigma2;
  config.preprocessing.b = b;
  return config;
}

struct CubicDraw {
  double a, sigma2, b;
};

std::vector<CubicDraw> cubic_draws() {
  std::mt19937_64 rng(20240601);
  std::vector<CubicDraw> draws;
  for (int i = 0; i < 200; ++i) {
    const double a = oracle::uniform(rng, -3.0, 3.0);
    const double sigma2 = positive_upto(rng, 10.0);
    const double b = positive_upto(rng, 10.0);
    draws.push_back({a, sigma2, b});
  }
  return draws;
}

Verdict cubic_optimum() {
  const auto start = std::chrono::steady_clock::now();
  int misses = 0;
  double worst_steps = 0.0;
  double worst_residual = 0.0;
  for (const auto& d : cubic_draws()) {
    const auto optimum = optimal_tau_inverse_linear({d.a, d.sigma2}, d.b);
    const double hi = 1.5 * tau_upper_bound(d.a, d.sigma2 / d.b);
    const auto grid = oracle::grid_minimum(plain(d.a, d.sigma2, d.b), 0.0, hi, 100000);
    const double steps = std::abs(optimum.tau_opt - grid.tau) / grid.step;
    const double residual = std::abs(cubic_residual(d.a, d.sigma2 / d.b, optimum.tau_opt));
    worst_steps = std::max(worst_steps, steps);
    worst_residual = std::max(worst_residual, residual);
    if (steps > 2.0 || residual > 1e-12) ++misses;
  }
  const double elapsed = seconds_since(start);
  return {misses == 0 && elapsed < 10.0,
          fmt("200 draws, worst grid distance %.3f steps, worst |F| %.2e, %d misses, %.2f s", worst_steps,
              worst_residual, misses, elapsed)};
}

Verdict upper_bound() {
  int violations = 0;
  double tightest = 0.0;
  for (const auto& d : cubic_draws()) {
    const double tau = optimal_tau_inverse_linear({d.a, d.sigma2}, d.b).tau_opt;
    const double bound = tau_upper_bound(d.a, d.sigma2 / d.b);
    tightest = std::max(tightest, tau / bound);
    if (tau > bound) ++violations;
  }
  const double exact = tau_upper_bound(1.0, 1.0);
  return {violations == 0 && exact == 0.5,
          fmt("%d violations on 200 draws, max tau_opt/tau_u %.6f, tau_u(a=1, s=1) = %.17g", violations, tightest,
              exact)};
}

Verdict monotonicity() {
  int violations = 0;
  int comparisons = 0;
  const auto s_values = numeric::logspace(0.01, 100.0, 40);
  for (double a : {0.0, 0.5, 2.0}) {
    double previous = INFINITY;
    for (double s : s_values) {
      const double tau = optimal_tau_inverse_linear({a, s}, 1.0).tau_opt;
      if (!(tau < previous)) ++violations;
      ++comparisons;
      previous = tau;
    }
  }
  double previous = INFINITY;
  for (double a2 : numeric::logspace(0.01, 25.0, 40)) {
    const double tau = optimal_tau_inverse_linear({std::sqrt(a2), 1.0}, 1.0).tau_opt;
    if (!(tau < previous)) ++violations;
    ++comparisons;
    previous = tau;
  }
  return {violations == 0, fmt("%d violations in %d sweep points", violations, comparisons)};
}

Verdict sensitivity() {
  std::mt19937_64 rng(77);
  constexpr double h = 1e-6;
  double worst = 0.0;
  int bad_sign = 0;
  for (int i = 0; i < 50; ++i) {
    const double magnitude = oracle::uniform(rng, 0.1, 3.0);
    const double a = i % 2 ? magnitude : -magnitude;
    const double s = oracle::uniform(rng, 0.1, 10.0);
    const auto closed = tau_opt_sensitivity({a, s}, 1.0);
    auto tau_at = [](double a2, double s_value, double sign) {
      return optimal_tau_inverse_linear({sign * std::sqrt(a2), s_value}, 1.0).tau_opt;
    };
    const double sign = a < 0 ? -1.0 : 1.0;
    const double a2 = a * a;
    const double fd_s = (tau_at(a2, s * (1 + h), sign) - tau_at(a2, s * (1 - h), sign)) / (2 * h * s);
    const double fd_a2 = (tau_at(a2 * (1 + h), s, sign) - tau_at(a2 * (1 - h), s, sign)) / (2 * h * a2);
    worst = std::max({worst, std::abs(fd_s / closed.dtau_ds - 1.0), std::abs(fd_a2 / closed.dtau_da2 - 1.0)});
    if (!(closed.dtau_ds < 0.0 && closed.dtau_da2 < 0.0)) ++bad_sign;
  }
  return {worst <= 1e-4 && bad_sign == 0,
          fmt("50 draws, worst relative gap to finite differences %.2e, %d nonnegative derivatives", worst, bad_sign)};
}

Verdict limits() {
  std::mt19937_64 rng(5150);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = -oracle::uniform(rng, 0.1, 3.0);
    const double sigma2 = oracle::uniform(rng, 0.1, 10.0);
    const double b = oracle::uniform(rng, 0.1, 10.0);
    const auto config = config_of(a, sigma2, b);
    const double limit = sigma2 / (2 * std::abs(a));
    for (double tau : {1e-7, 1e4 / std::abs(a)}) {
      worst = std::max(worst, std::abs(steady_state_error_variance(config, tau, 1).total / limit - 1.0));
    }
  }
  double smallest_ratio = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const double a = i == 0 ? 0.0 : oracle::uniform(rng, 0.0, 3.0);
    const double sigma2 = i == 0 ? 1.0 : oracle::uniform(rng, 0.1, 10.0);
    const double b = i == 0 ? 1.0 : oracle::uniform(rng, 0.1, 10.0);
    const auto config = config_of(a, sigma2, b);
    const double best = optimal_tau(config, 1).value;
    const double far = 1e4 * std::max(1.0, a > 0.0 ? 1.0 / a : 1.0);
    for (double tau : {1e-7, far}) {
      smallest_ratio = std::min(smallest_ratio, steady_state_error_variance(config, tau, 1).total / best);
    }
  }
  return {worst <= 0.01 && smallest_ratio > 1e3,
          fmt("stable: worst relative gap to sigma2_w/(2|a|) %.2e; a >= 0: smallest P(extreme)/P(tau_opt) %.4g",
              worst, smallest_ratio)};
}

Verdict phase_transition() {
  const auto gammas = numeric::linspace(0.1, 10.0, 30);
  const auto ratios = numeric::linspace(0.1, 10.0, 30);
  int wrong = 0;
  int oracle_disagreements = 0;
  int excluded = 0;
  int raw = 0;
  for (double a : {0.0, 1.0}) {
    for (double gamma : gammas) {
      for (double s : ratios) {
        const double threshold = 2.0 * std::sqrt(s + a * a);
        if (std::abs(gamma - threshold) <= 1e-6) {
          ++excluded;
          continue;
        }
        const auto optimum = optimal_tau_exponential({a, s}, 1.0, gamma);
        const bool is_raw = optimum.method == OptimumMethod::RawTransmission;
        raw += is_raw;
        if (is_raw != (gamma <= threshold)) ++wrong;

        auto p = plain(a, s, 1.0);
        p.kind = 2;
        p.gamma = gamma;
        const auto at_zero = oracle::variance(p, 0.0L);
        const auto grid = oracle::grid_minimum(p, 0.0, 5.0, 2000);
        if (is_raw) {
          if (grid.value < at_zero) ++oracle_disagreements;
        } else {
          const auto at_opt = oracle::variance(p, optimum.tau_opt);
          if (!(at_opt < at_zero) || grid.value < at_opt * (1 - 1e-15L)) ++oracle_disagreements;
        }
      }
    }
  }
  return {wrong == 0 && oracle_disagreements == 0,
          fmt("%d misclassified, %d oracle disagreements, %d raw of %d, %d in threshold band", wrong,
              oracle_disagreements, raw, 1800 - excluded, excluded)};
}

Verdict quintic() {
  std::mt19937_64 rng(8675309);
  int wrong_count = 0;
  int misses = 0;
  double worst_steps = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = oracle::uniform(rng, -3.0, 3.0);
    if (std::abs(a) < 0.05) a = std::copysign(0.05, a);
    const double sigma2 = oracle::uniform(rng, 0.1, 10.0);
    const double b = oracle::uniform(rng, 0.1, 10.0);
    const double c = oracle::uniform(rng, 0.01, 5.0);
    const auto roots = quintic_positive_roots(a, sigma2 / b, c);
    if (roots.size() != 2) {
      ++wrong_count;
      continue;
    }
    auto p = plain(a, sigma2, b);
    p.comm_c = c;
    const double hi = 4.0 * std::max(tau_upper_bound(a, sigma2 / b), std::sqrt(c));
    const auto grid = oracle::grid_minimum(p, 0.0, hi, 100000);
    const double tau = optimal_tau_with_compression({a, sigma2}, b, c).tau_opt;
    const double steps = std::max(std::abs(roots[1] - grid.tau), std::abs(tau - grid.tau)) / grid.step;
    worst_steps = std::max(worst_steps, steps);
    if (steps > 2.0) ++misses;
  }
  const double limit = optimal_tau_with_compression({0.0, 1.0}, 1.0, 1e-12).tau_opt;
  const double gap = std::abs(limit - std::pow(4.0, -1.0 / 3.0));
  return {wrong_count == 0 && misses == 0 && gap <= 1e-3,
          fmt("%d draws without exactly two roots, worst grid distance %.3f steps, c=1e-12 gap %.2e", wrong_count,
              worst_steps, gap)};
}

Verdict argmin_invariance() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto base = config_of(oracle::uniform(rng, -3.0, 3.0), oracle::uniform(rng, 0.1, 10.0),
                          oracle::uniform(rng, 0.1, 10.0));
    if (i % 2) base.preprocessing = {PreprocessingKind::InversePower, base.preprocessing.b, oracle::uniform(rng, 0.5, 2.0)};
    const double tau = optimal_tau(base, 1).tau_opt;
    for (double tau_c : {0.1, 1.0, 5.0}) {
      auto delayed = base;
      delayed.delays.comm = ConstantDelay{tau_c};
      worst = std::max(worst, std::abs(optimal_tau(delayed, 1).tau_opt - tau));
    }
  }
  return {worst <= 1e-9, fmt("50 configs x 3 delays, worst tau_opt shift %.2e", worst)};
}

Verdict figure5() {
  auto with = config_of(-1.0, 10.0, 0.1);
  with.sensors = 10;
  with.delays = {ConstantDelay{0.1}, ConstantDelay{0.02}};
  const double tau = 0.1;

  // Oracle table and drops.
  auto p_with = plain(-1.0, 10.0, 0.1);
  p_with.tau_c = 0.1;
  p_with.tau_f = 0.02;
  auto p_without = p_with;
  p_without.tau_f = 0.0;
  int oracle_s = 1;
  oracle::real oracle_best = INFINITY;
  for (int s = 1; s <= 10; ++s) {
    p_with.sensors = s;
    const auto v = oracle::variance(p_with, tau);
    if (v < oracle_best) {
      oracle_best = v;
      oracle_s = s;
    }
  }

  const auto table = optimal_sensor_count(with, tau);
  const auto drop = fusion_neglect_drop(with, tau);
  p_with.sensors = p_without.sensors = oracle_s;
  const double oracle_drop =
      static_cast<double>((oracle::variance(p_with, tau) - oracle::variance(p_without, tau)) / oracle::variance(p_with, tau));
  const bool twelve = std::abs(drop.at_s_opt_vs_with_fusion - 0.12) <= 0.02;
  const bool agrees = std::abs(drop.at_s_opt_vs_with_fusion - oracle_drop) <= 1e-12;
  auto in_band = [](double v) { return v >= 0.25 && v <= 0.42; };
  const bool thirty_two = in_band(drop.at_all_vs_with_fusion) || in_band(drop.at_all_vs_without_fusion);
  return {table.s_opt == 4 && oracle_s == 4 && twelve && agrees && thirty_two,
          fmt("S_opt %d (oracle %d); drop at S_opt %.2f%% (vs no-fusion %.2f%%); with all %d sensors %.2f%% / %.2f%%",
              table.s_opt, oracle_s, 100 * drop.at_s_opt_vs_with_fusion, 100 * drop.at_s_opt_vs_without_fusion,
              drop.sensors, 100 * drop.at_all_vs_with_fusion, 100 * drop.at_all_vs_without_fusion)};
}

Verdict figure4_crossing() {
  bool ok = true;
  std::string detail;
  for (double a : {0.1, -0.1}) {
    auto constant = config_of(a, 1.0, 1.0);
    constant.delays.comm = ConstantDelay{1.0};
    auto compressing = config_of(a, 1.0, 1.0);
    compressing.delays.comm = CompressingDelay{1.0};
    const auto crossing = variance_crossing(constant, compressing, 1, 1e-3, 50.0);
    // The delays coincide where c / tau = tau_c, i.e. tau = 1.
    const bool hit = crossing && *crossing > 0.0 && std::abs(*crossing - 1.0) <= 1e-8;
    ok = ok && hit;
    detail += fmt("a=%+.1f: tau*=%s  ", a, crossing ? fmt("%.12f", *crossing).c_str() : "none");
  }
  return {ok, detail};
}

Verdict monte_carlo() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1234567);
  std::vector<double> relative_errors;
  int within = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double a = -oracle::uniform(rng, 0.2, 2.0);
    auto config = config_of(a, oracle::uniform(rng, 0.5, 5.0), oracle::uniform(rng, 0.1, 2.0));
    config.sensors = 1 + i % 3;
    if (i % 2) config.delays.comm = ConstantDelay{std::round(oracle::uniform(rng, 0.0, 0.5) * 1e3) / 1e3};
    const double tau = std::round(oracle::uniform(rng, 0.05, 1.0) * 1e3) / 1e3;
    SimPlan plan;
    plan.step = 1e-3;
    plan.horizon = 100.0 / std::abs(a);
    plan.trials = 64;
    plan.seed = 1000 + static_cast<std::uint64_t>(i);
    const auto result = monte_carlo_variance(config, tau, config.sensors, plan);
    const double expected = static_cast<double>([&] {
      oracle::Params p = plain(config.system.a, config.system.sigma2_w, config.preprocessing.b);
      if (const auto* c = std::get_if<ConstantDelay>(&config.delays.comm)) p.tau_c = c->value;
      p.sensors = config.sensors;
      return oracle::variance(p, tau);
    }());
    const double z = (result.empirical_variance - expected) / result.std_error;
    worst_z = std::max(worst_z, std::abs(z));
    if (std::abs(z) <= 4.0) ++within;
    relative_errors.push_back(std::abs(result.empirical_variance / expected - 1.0));
  }
  std::sort(relative_errors.begin(), relative_errors.end());
  const double median = 0.5 * (relative_errors[19] + relative_errors[20]);
  const double elapsed = seconds_since(start);
  return {within >= 38 && median <= 0.03 && elapsed < 300.0,
          fmt("|z| <= 4 in %d/40 (worst %.2f), median relative error %.2f%%, %.1f s", within, worst_z, 100 * median,
              elapsed)};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Verdict determinism() {
  const auto dir = fs::temp_directory_path() / "procnet_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto config_path = dir / "stable.ini";
  std::ofstream(config_path) << to_config_text(config_of(-1.0, 1.0, 1.0));

  std::ostringstream sink;
  int failures = 0;
  std::vector<std::string> simulated;
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("simulate" + std::to_string(run) + ".csv");
    failures += cli::run({"simulate", config_path.string(), "--tau", "0.25,0.5", "--horizon", "60", "--trials", "16",
                          "--seed", "31", "--out", out.string()},
                         sink, sink) != 0;
    simulated.push_back(read_file(out));
  }
  int differing = simulated[0] != simulated[1] || simulated[0].empty();

  for (int figure : {5, 6}) {
    std::vector<fs::path> dirs{dir / fmt("fig%d_a", figure), dir / fmt("fig%d_b", figure)};
    for (const auto& out_dir : dirs) {
      failures += cli::run({"reproduce", "--figure", std::to_string(figure), "--out-dir", out_dir.string()}, sink,
                           sink) != 0;
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto name = entry.path().filename();
      if (read_file(entry.path()) != read_file(dirs[1] / name)) ++differing;
    }
  }
  return {failures == 0 && differing == 0,
          fmt("%d command failures, %d differing outputs across repeated simulate and reproduce runs", failures,
              differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"cubic optimum vs brute-force grid", cubic_optimum},
      {"upper bound on the optimum", upper_bound},
      {"optimum decreases in s and a^2", monotonicity},
      {"closed-form sensitivities", sensitivity},
      {"variance limits at both ends", limits},
      {"raw transmission phase transition", phase_transition},
      {"quintic roots under compression", quintic},
      {"argmin invariance to constant delay", argmin_invariance},
      {"fusion delay network table", figure5},
      {"constant vs compressing delay crossing", figure4_crossing},
      {"Monte Carlo agreement", monte_carlo},
      {"byte-identical reruns", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict verdict;
    try {
      verdict = criteria[i].second();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    failed += !verdict.pass;
    std::printf("%s  %2zu  %-40s %s\n", verdict.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                verdict.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
