#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "procnet/analytic.hpp"
#include "procnet/config_io.hpp"
#include "procnet/numeric.hpp"
#include "procnet/optimize.hpp"
#include "procnet/simulate.hpp"

namespace procnet::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BracketFailure:
    case ErrorCode::RootScanFailure: return kExitSolver;
    case ErrorCode::HorizonTooShort: return kExitSimulation;
    default: return kExitUsage;
  }
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json outputs_json = nlohmann::json::array();
  for (const auto& record : outputs) outputs_json.push_back({{"path", record.path}, {"rows", record.rows}});
  nlohmann::json out = {{"command", command}, {"outputs", outputs_json}, {"wall_time_s", wall_time_s}};
  if (config_digest) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << *config_digest;
    out["config_digest"] = hex.str();
  }
  return out;
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "s") return SweepParam::S;
  if (name == "a2") return SweepParam::A2;
  if (name == "gamma") return SweepParam::Gamma;
  if (name == "c") return SweepParam::C;
  throw Error(ErrorCode::InvalidArgument, "--param must be one of s, a2, gamma, c");
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::S: return "s";
    case SweepParam::A2: return "a2";
    case SweepParam::Gamma: return "gamma";
    case SweepParam::C: return "c";
  }
  return "?";
}

namespace {

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed ") + what + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

SweepRange parse_range(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) throw Error(ErrorCode::InvalidArgument, "--range must be lo:hi:n");
  SweepRange range;
  range.lo = parse_number<double>(text.substr(0, first), "range lower end");
  range.hi = parse_number<double>(text.substr(first + 1, second - first - 1), "range upper end");
  range.n = parse_number<int>(text.substr(second + 1), "range count");
  if (range.n < 2) throw Error(ErrorCode::InvalidArgument, "--range needs n >= 2");
  if (!(range.lo > 0.0) || !(range.hi >= range.lo) || !std::isfinite(range.hi)) {
    throw Error(ErrorCode::InvalidArgument, "--range needs 0 < lo <= hi");
  }
  return range;
}

std::vector<double> sweep_values(const SweepRange& range, bool log_spaced) {
  const auto n = static_cast<std::size_t>(range.n);
  return log_spaced ? numeric::logspace(range.lo, range.hi, n) : numeric::linspace(range.lo, range.hi, n);
}

NetworkConfig apply_sweep(const NetworkConfig& base, SweepParam param, double value) {
  auto config = base;
  switch (param) {
    case SweepParam::S: config.system.sigma2_w = value * config.preprocessing.b; break;
    case SweepParam::A2: config.system.a = std::copysign(std::sqrt(value), base.system.a); break;
    case SweepParam::Gamma:
      if (config.preprocessing.kind == PreprocessingKind::InverseLinear) {
        throw Error(ErrorCode::InvalidArgument, "gamma sweep needs kind inverse_power or exponential");
      }
      config.preprocessing.gamma = value;
      break;
    case SweepParam::C: config.delays.comm = CompressingDelay{value}; break;
  }
  return config;
}

void write_eval(CsvWriter& csv, const NetworkConfig& config, const std::vector<double>& taus, int sensors) {
  csv.header({"tau", "tau_tot", "f", "q", "total"});
  for (double tau : taus) {
    const auto v = steady_state_error_variance(config, tau, sensors);
    csv.cell(tau).cell(v.delays.tau_tot).cell(v.estimation_part).cell(v.noise_part).cell(v.total);
    csv.end_row();
  }
}

void write_sweep(CsvWriter& csv, const NetworkConfig& config, SweepParam param, const std::vector<double>& values,
                 int sensors) {
  csv.header({"param", "tau_opt", "tau_upper_bound", "P_opt"});
  for (double value : values) {
    const auto swept = apply_sweep(config, param, value);
    const auto optimum = optimal_tau(swept, sensors);
    const double s_eff = swept.system.sigma2_w * sensors / swept.preprocessing.b;
    csv.cell(value).cell(optimum.tau_opt).cell(tau_upper_bound(swept.system.a, s_eff)).cell(optimum.value);
    csv.end_row();
  }
}

void write_network(CsvWriter& csv, const NetworkConfig& config, const std::vector<double>& taus) {
  csv.header({"tau", "S", "P", "is_s_opt"});
  for (double tau : taus) {
    const auto result = optimal_sensor_count(config, tau);
    for (const auto& [s, value] : result.table) {
      csv.cell(tau).cell(s).cell(value).cell(s == result.s_opt ? 1 : 0);
      csv.end_row();
    }
  }
}

namespace {

/// Data goes to --out when given, otherwise to the output stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path.empty() || path == "-" ? "<stdout>" : path) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }

  std::ostream& stream() { return *stream_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct CommonOptions {
  std::string config_path;
  std::string out;
};

NetworkConfig load_validated(const std::string& path, RunReport& report) {
  auto config = load_config(path);
  report.config_digest = config_digest(config);
  const auto validation = validate(config);
  if (!validation.ok()) throw Error(validation.violations.front().code, "invalid config\n" + validation.summary());
  return config;
}

int resolve_sensors(const NetworkConfig& config, std::optional<int> requested) {
  const int sensors = requested.value_or(config.sensors);
  if (sensors < 1 || sensors > config.sensors) {
    throw Error(ErrorCode::InvalidArgument,
                "--sensors must lie in 1.." + std::to_string(config.sensors) + ", got " + std::to_string(sensors));
  }
  return sensors;
}

void write_optimum_row(CsvWriter& csv, std::string_view label, const Optimum& optimum) {
  csv.cell(label).cell(optimum.tau_opt).cell(optimum.value).cell(to_string(optimum.method));
  csv.cell(optimum.bracket_lo).cell(optimum.bracket_hi);
  csv.end_row();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state estimation error of smart-sensor processing networks"};
  app.require_subcommand(1);

  CommonOptions common;
  std::vector<double> taus;
  std::optional<int> sensors;

  auto* eval = app.add_subcommand("eval", "Evaluate the variance breakdown at given preprocessing delays");
  eval->add_option("config", common.config_path, "Config file")->required();
  eval->add_option("--tau", taus, "Preprocessing delays")->required()->delimiter(',');
  eval->add_option("--sensors", sensors, "Sensors in use (default: all)");
  eval->add_option("--out", common.out, "Output CSV (default: stdout)");

  std::string sensors_spec;
  double quantum = 0.0;
  auto* optimize = app.add_subcommand("optimize", "Optimal preprocessing delay per sensor count");
  optimize->add_option("config", common.config_path, "Config file")->required();
  optimize->add_option("--sensors", sensors_spec, "Sensor count(s): N, a list, 'all' or 'joint'");
  optimize->add_option("--quantum", quantum, "Also report tau_opt rounded up to this quantum");
  optimize->add_option("--out", common.out, "Output CSV (default: stdout)");

  std::string param_name;
  std::string range_text;
  bool log_spaced = false;
  auto* sweep = app.add_subcommand("sweep", "Optimal delay and its upper bound across a parameter range");
  sweep->add_option("config", common.config_path, "Config file")->required();
  sweep->add_option("--param", param_name, "s, a2, gamma or c")->required();
  sweep->add_option("--range", range_text, "lo:hi:n")->required();
  sweep->add_flag("--log", log_spaced, "Geometric spacing");
  sweep->add_option("--sensors", sensors, "Sensors in use (default: all)");
  sweep->add_option("--out", common.out, "Output CSV (default: stdout)");

  auto* network = app.add_subcommand("network", "Variance versus sensor count at fixed delays");
  network->add_option("config", common.config_path, "Config file")->required();
  network->add_option("--tau", taus, "Preprocessing delays")->required()->delimiter(',');
  network->add_option("--out", common.out, "Output CSV (default: stdout)");

  SimPlan plan;
  std::optional<double> horizon;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the closed-form variance");
  simulate->add_option("config", common.config_path, "Config file")->required();
  simulate->add_option("--tau", taus, "Preprocessing delays")->required()->delimiter(',');
  simulate->add_option("--sensors", sensors, "Sensors in use (default: all)");
  simulate->add_option("--step", plan.step, "Discretization step")->capture_default_str();
  simulate->add_option("--horizon", horizon, "Simulated time per trial (default: 100 x max(1/|a|, tau_tot))");
  simulate->add_option("--trials", plan.trials, "Independent trials")->capture_default_str();
  simulate->add_option("--seed", plan.seed, "Base seed")->capture_default_str();
  simulate->add_option("--burn-in", plan.burn_in_fraction, "Discarded fraction of each trial")->capture_default_str();
  simulate->add_option("--threads", plan.threads, "Worker threads, 0 = all cores")->capture_default_str();
  simulate->add_option("--out", common.out, "Output CSV (default: stdout)");

  int figure = 0;
  std::string out_dir = ".";
  auto* reproduce = app.add_subcommand("reproduce", "Write the data behind a figure as CSV plus a manifest");
  reproduce->add_option("--figure", figure, "2, 3, 4, 5 or 6")->required()->check(CLI::Range(2, 6));
  reproduce->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  std::vector<const char*> argv{"procnet"};
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  int status = kExitOk;
  try {
    if (eval->parsed()) {
      report.command = "eval";
      const auto config = load_validated(common.config_path, report);
      const int s = resolve_sensors(config, sensors);
      Sink sink(common.out, out);
      CsvWriter csv(sink.stream());
      write_eval(csv, config, taus, s);
      report.outputs.push_back({sink.path(), csv.rows()});
    } else if (optimize->parsed()) {
      report.command = "optimize";
      const auto config = load_validated(common.config_path, report);
      Sink sink(common.out, out);
      CsvWriter csv(sink.stream());
      csv.header({"S", "tau_opt", "P", "method", "bracket_lo", "bracket_hi"});
      const bool joint = sensors_spec == "joint";
      std::vector<int> counts;
      if (joint || sensors_spec == "all") {
        for (int s = 1; s <= config.sensors; ++s) counts.push_back(s);
      } else if (sensors_spec.empty()) {
        counts.push_back(config.sensors);
      } else {
        std::string item;
        std::istringstream list(sensors_spec);
        while (std::getline(list, item, ',')) {
          counts.push_back(resolve_sensors(config, parse_number<int>(item, "--sensors")));
        }
      }
      // Rows are flushed as they are produced so a solver failure keeps them.
      std::optional<std::pair<int, Optimum>> best;
      try {
        for (int s : counts) {
          const auto optimum = optimal_tau(config, s);
          write_optimum_row(csv, std::to_string(s), optimum);
          sink.stream().flush();
          if (quantum > 0.0) {
            err << "S=" << s << ": tau_opt rounded up to quantum " << quantum << " is "
                << format_double(round_up_to_quantum(optimum.tau_opt, quantum), 17) << '\n';
          }
          if (!best || optimum.value < best->second.value) best = std::make_pair(s, optimum);
        }
        if (joint && best) write_optimum_row(csv, "joint:" + std::to_string(best->first), best->second);
      } catch (...) {
        report.outputs.push_back({sink.path(), csv.rows()});
        throw;
      }
      report.outputs.push_back({sink.path(), csv.rows()});
    } else if (sweep->parsed()) {
      report.command = "sweep";
      const auto param = parse_sweep_param(param_name);
      const auto range = parse_range(range_text);
      const auto config = load_validated(common.config_path, report);
      const int s = resolve_sensors(config, sensors);
      const auto values = sweep_values(range, log_spaced);
      Sink sink(common.out, out);
      CsvWriter csv(sink.stream());
      write_sweep(csv, config, param, values, s);
      report.outputs.push_back({sink.path(), csv.rows()});
    } else if (network->parsed()) {
      report.command = "network";
      const auto config = load_validated(common.config_path, report);
      Sink sink(common.out, out);
      CsvWriter csv(sink.stream());
      write_network(csv, config, taus);
      report.outputs.push_back({sink.path(), csv.rows()});
    } else if (simulate->parsed()) {
      report.command = "simulate";
      const auto config = load_validated(common.config_path, report);
      const int s = resolve_sensors(config, sensors);
      Sink sink(common.out, out);
      CsvWriter csv(sink.stream());
      csv.header({"tau", "S", "empirical", "stderr", "analytic", "z_score"});
      for (double tau : taus) {
        auto trial_plan = plan;
        if (horizon) {
          trial_plan.horizon = *horizon;
        } else {
          const double a = config.system.a;
          const double mixing = a < 0.0 ? 1.0 / std::abs(a) : 1.0;
          trial_plan.horizon = 100.0 * std::max(mixing, total_delay(config, tau, s).tau_tot);
        }
        const auto result = monte_carlo_variance(config, tau, s, trial_plan);
        csv.cell(tau).cell(s).cell(result.empirical_variance).cell(result.std_error);
        csv.cell(result.analytic_variance).cell(result.z_score);
        csv.end_row();
        if (result.delay.residual > 0.0) {
          err << "tau=" << tau << ": total delay rounded to " << result.delay.steps << " steps (residual "
              << result.delay.residual << ")\n";
        }
      }
      report.outputs.push_back({sink.path(), csv.rows()});
    } else if (reproduce->parsed()) {
      report.command = "reproduce";
      report.outputs = reproduce_figure(figure, out_dir);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    status = exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    status = kExitUsage;
  }

  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  err << report.to_json().dump() << '\n';
  return status;
}

}  // namespace procnet::cli
