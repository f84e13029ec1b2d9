#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "procnet/csv.hpp"
#include "procnet/error.hpp"
#include "procnet/model.hpp"

namespace procnet::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitSolver = 3, kExitSimulation = 4 };

int exit_code_for(ErrorCode code);

struct OutputRecord {
  std::string path;
  std::size_t rows = 0;
};

struct RunReport {
  std::string command;
  std::optional<std::uint64_t> config_digest;
  std::vector<OutputRecord> outputs;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
};

enum class SweepParam { S, A2, Gamma, C };

SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam param);

/// "lo:hi:n" with n >= 2 and 0 < lo <= hi.
struct SweepRange {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

SweepRange parse_range(std::string_view text);
std::vector<double> sweep_values(const SweepRange& range, bool log_spaced);

/// Config with the swept parameter set to `value`; s keeps b fixed and
/// scales sigma2_w, a2 keeps the sign of a.
NetworkConfig apply_sweep(const NetworkConfig& base, SweepParam param, double value);

// Each writer emits a header plus one row per evaluation.
void write_eval(CsvWriter& csv, const NetworkConfig& config, const std::vector<double>& taus, int sensors);
void write_sweep(CsvWriter& csv, const NetworkConfig& config, SweepParam param, const std::vector<double>& values,
                 int sensors);
void write_network(CsvWriter& csv, const NetworkConfig& config, const std::vector<double>& taus);

/// Parameter sets used by `reproduce`.
NetworkConfig figure2_config();
NetworkConfig figure3_config();
NetworkConfig figure4_config(double a, const DelayLaw& comm);
NetworkConfig figure5_config(bool with_fusion);
NetworkConfig figure6_config();
inline constexpr double kFigure5Tau = 0.1;
inline const std::vector<double> kFigure6Taus = {0.05, 0.1, 0.15, 0.2};

/// Writes the CSV files and JSON manifest for one figure into `out_dir`.
std::vector<OutputRecord> reproduce_figure(int figure, const std::filesystem::path& out_dir);

/// Entry point shared by the executable and the tests; args exclude argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace procnet::cli
