#include <cmath>
#include <fstream>
#include <limits>

#include "commands.hpp"
#include "procnet/analytic.hpp"
#include "procnet/config_io.hpp"
#include "procnet/numeric.hpp"
#include "procnet/optimize.hpp"

namespace procnet::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kCurvePoints = 300;

NetworkConfig make_config(double a, double sigma2_w, double b, int sensors) {
  NetworkConfig config;
  config.system.a = a;
  config.system.sigma2_w = sigma2_w;
  config.preprocessing = {PreprocessingKind::InverseLinear, b, 1.0};
  config.sensors = sensors;
  return config;
}

json delay_json(const DelayLaw& law) {
  if (const auto* constant = std::get_if<ConstantDelay>(&law)) return {{"kind", "constant"}, {"value", constant->value}};
  if (const auto* compressing = std::get_if<CompressingDelay>(&law)) {
    return {{"kind", "compressing"}, {"coeff", compressing->coeff}};
  }
  return {{"kind", "none"}};
}

json config_json(const NetworkConfig& config) {
  return {{"a", config.system.a},
          {"sigma2_w", config.system.sigma2_w},
          {"kind", std::string(to_string(config.preprocessing.kind))},
          {"b", config.preprocessing.b},
          {"comm", delay_json(config.delays.comm)},
          {"fusion", delay_json(config.delays.fusion)},
          {"sensors", config.sensors},
          {"config_digest", config_digest(config)}};
}

json optimum_json(const Optimum& optimum) {
  return {{"tau_opt", optimum.tau_opt}, {"P", optimum.value}, {"method", std::string(to_string(optimum.method))}};
}

// JSON has no infinity; unbounded limits are written as null.
json finite_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

class FigureWriter {
 public:
  FigureWriter(int figure, std::filesystem::path dir) : figure_(figure), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  template <typename Body>
  void csv(const std::string& name, Body&& body) {
    const auto path = dir_ / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
    CsvWriter writer(file);
    body(writer);
    outputs_.push_back({path.string(), writer.rows()});
  }

  std::vector<OutputRecord> finish(json manifest) {
    manifest["figure"] = figure_;
    json files = json::array();
    for (const auto& record : outputs_) {
      files.push_back({{"file", std::filesystem::path(record.path).filename().string()}, {"rows", record.rows}});
    }
    manifest["files"] = files;
    const auto path = dir_ / ("figure" + std::to_string(figure_) + "_manifest.json");
    std::ofstream file(path, std::ios::binary);
    file << manifest.dump(2) << '\n';
    outputs_.push_back({path.string(), 1});
    return outputs_;
  }

 private:
  int figure_;
  std::filesystem::path dir_;
  std::vector<OutputRecord> outputs_;
};

std::vector<OutputRecord> figure2(const std::filesystem::path& dir) {
  FigureWriter writer(2, dir);
  const auto config = figure2_config();
  const auto taus = numeric::linspace(0.02, 4.0, kCurvePoints);
  writer.csv("figure2.csv", [&](CsvWriter& csv) { write_eval(csv, config, taus, 1); });
  return writer.finish({{"description", "variance split into projected filter part f and process-noise part q"},
                        {"config", config_json(config)},
                        {"tau_range", {taus.front(), taus.back()}},
                        {"optimum", optimum_json(optimal_tau(config, 1))}});
}

std::vector<OutputRecord> figure3(const std::filesystem::path& dir) {
  FigureWriter writer(3, dir);
  const auto config = figure3_config();
  const auto values = numeric::logspace(0.01, 100.0, 200);
  writer.csv("figure3.csv", [&](CsvWriter& csv) { write_sweep(csv, config, SweepParam::S, values, 1); });
  return writer.finish({{"description", "optimal delay versus s = sigma2_w / b with its upper bound"},
                        {"config", config_json(config)},
                        {"param", "s"},
                        {"range", {values.front(), values.back()}},
                        {"log_spaced", true}});
}

std::vector<OutputRecord> figure4(const std::filesystem::path& dir) {
  FigureWriter writer(4, dir);
  const auto taus = numeric::linspace(0.02, 6.0, kCurvePoints);
  json panels = json::array();
  for (const double a : {0.1, -0.1}) {
    const auto none = figure4_config(a, NoDelay{});
    const auto constant = figure4_config(a, ConstantDelay{1.0});
    const auto compressing = figure4_config(a, CompressingDelay{1.0});
    const auto limit = variance_limits(none, 1).at_infinity;
    const std::string name = a > 0.0 ? "figure4_unstable.csv" : "figure4_stable.csv";
    writer.csv(name, [&](CsvWriter& csv) {
      csv.header({"tau", "no_comm", "constant_comm", "compressing_comm", "limit"});
      for (double tau : taus) {
        csv.cell(tau)
            .cell(steady_state_error_variance(none, tau, 1).total)
            .cell(steady_state_error_variance(constant, tau, 1).total)
            .cell(steady_state_error_variance(compressing, tau, 1).total)
            .cell(limit);
        csv.end_row();
      }
    });
    const auto crossing = variance_crossing(constant, compressing, 1, 1e-3, 50.0);
    panels.push_back({{"file", name},
                      {"a", a},
                      {"no_comm", config_json(none)},
                      {"constant_comm", config_json(constant)},
                      {"compressing_comm", config_json(compressing)},
                      {"limit", finite_or_null(limit)},
                      {"optimum_no_comm", optimum_json(optimal_tau(none, 1))},
                      {"optimum_constant_comm", optimum_json(optimal_tau(constant, 1))},
                      {"optimum_compressing_comm", optimum_json(optimal_tau(compressing, 1))},
                      {"crossing_tau", crossing ? json(*crossing) : json(nullptr)}});
  }
  return writer.finish({{"description", "variance without, with constant, and with compressing communication delay"},
                        {"tau_range", {taus.front(), taus.back()}},
                        {"panels", panels}});
}

std::vector<OutputRecord> figure5(const std::filesystem::path& dir) {
  FigureWriter writer(5, dir);
  const auto with = figure5_config(true);
  const auto without = figure5_config(false);
  const auto with_table = optimal_sensor_count(with, kFigure5Tau);
  const auto without_table = optimal_sensor_count(without, kFigure5Tau);
  writer.csv("figure5.csv", [&](CsvWriter& csv) {
    csv.header({"S", "with_fusion", "without_fusion", "is_s_opt"});
    for (std::size_t i = 0; i < with_table.table.size(); ++i) {
      const int s = with_table.table[i].first;
      csv.cell(s).cell(with_table.table[i].second).cell(without_table.table[i].second).cell(s == with_table.s_opt ? 1 : 0);
      csv.end_row();
    }
  });
  const auto drop = fusion_neglect_drop(with, kFigure5Tau);
  return writer.finish({{"description", "variance versus sensor count with and without fusion delay"},
                        {"tau", kFigure5Tau},
                        {"with_fusion", config_json(with)},
                        {"without_fusion", config_json(without)},
                        {"s_opt", with_table.s_opt},
                        {"P_s_opt", with_table.value},
                        {"drop_at_s_opt_vs_with_fusion", drop.at_s_opt_vs_with_fusion},
                        {"drop_at_s_opt_vs_without_fusion", drop.at_s_opt_vs_without_fusion},
                        {"drop_at_all_vs_with_fusion", drop.at_all_vs_with_fusion},
                        {"drop_at_all_vs_without_fusion", drop.at_all_vs_without_fusion}});
}

std::vector<OutputRecord> figure6(const std::filesystem::path& dir) {
  FigureWriter writer(6, dir);
  const auto config = figure6_config();
  writer.csv("figure6.csv", [&](CsvWriter& csv) { write_network(csv, config, kFigure6Taus); });
  json per_tau = json::array();
  for (double tau : kFigure6Taus) {
    const auto result = optimal_sensor_count(config, tau);
    per_tau.push_back({{"tau", tau}, {"s_opt", result.s_opt}, {"P", result.value}});
  }
  const auto joint = joint_optimize(config);
  return writer.finish({{"description", "variance versus sensor count for several preprocessing delays"},
                        {"config", config_json(config)},
                        {"taus", kFigure6Taus},
                        {"per_tau", per_tau},
                        {"joint", {{"S", joint.s_opt}, {"optimum", optimum_json(joint.optimum)}}}});
}

}  // namespace

NetworkConfig figure2_config() { return make_config(0.1, 1.0, 1.0, 1); }

NetworkConfig figure3_config() { return make_config(1.0, 1.0, 1.0, 1); }

NetworkConfig figure4_config(double a, const DelayLaw& comm) {
  auto config = make_config(a, 1.0, 1.0, 1);
  config.delays.comm = comm;
  return config;
}

NetworkConfig figure5_config(bool with_fusion) {
  auto config = make_config(-1.0, 10.0, 0.1, 10);
  config.delays.comm = ConstantDelay{0.1};
  config.delays.fusion = with_fusion ? DelayLaw{ConstantDelay{0.02}} : DelayLaw{NoDelay{}};
  return config;
}

NetworkConfig figure6_config() { return figure5_config(true); }

std::vector<OutputRecord> reproduce_figure(int figure, const std::filesystem::path& out_dir) {
  switch (figure) {
    case 2: return figure2(out_dir);
    case 3: return figure3(out_dir);
    case 4: return figure4(out_dir);
    case 5: return figure5(out_dir);
    case 6: return figure6(out_dir);
    default: throw Error(ErrorCode::InvalidArgument, "figure must be one of 2, 3, 4, 5, 6");
  }
}

}  // namespace procnet::cli
