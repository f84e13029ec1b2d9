#include "procnet/model.hpp"

#include <cmath>
#include <sstream>

namespace procnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveNoise: return "NonPositiveNoise";
    case ErrorCode::NegativeDelayParam: return "NegativeDelayParam";
    case ErrorCode::ZeroSensors: return "ZeroSensors";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::RootScanFailure: return "RootScanFailure";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

std::string_view to_string(PreprocessingKind kind) {
  switch (kind) {
    case PreprocessingKind::InverseLinear: return "inverse_linear";
    case PreprocessingKind::InversePower: return "inverse_power";
    case PreprocessingKind::Exponential: return "exponential";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    out << to_string(v.code) << " [" << v.field << "]: " << v.message << '\n';
  }
  return out.str();
}

namespace {

// NaN fails every comparison, so "not (x > 0)" also rejects it.
void check_positive(ValidationReport& report, double value, const char* field, ErrorCode code) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    report.violations.push_back({code, field, "must be finite and > 0"});
  }
}

void check_delay(ValidationReport& report, const DelayLaw& law, const char* constant_field,
                 const char* compressing_field) {
  if (const auto* constant = std::get_if<ConstantDelay>(&law)) {
    if (!(constant->value >= 0.0) || !std::isfinite(constant->value)) {
      report.violations.push_back({ErrorCode::NegativeDelayParam, constant_field, "must be finite and >= 0"});
    }
  } else if (const auto* compressing = std::get_if<CompressingDelay>(&law)) {
    check_positive(report, compressing->coeff, compressing_field, ErrorCode::NegativeDelayParam);
  }
}

void check_system(ValidationReport& report, const ScalarSystem& system) {
  if (!std::isfinite(system.a)) {
    report.violations.push_back({ErrorCode::InvalidArgument, "a", "must be finite"});
  }
  check_positive(report, system.sigma2_w, "sigma2_w", ErrorCode::NonPositiveNoise);
  if (!std::isfinite(system.mu0)) {
    report.violations.push_back({ErrorCode::InvalidArgument, "mu0", "must be finite"});
  }
  if (!(system.p0 >= 0.0) || !std::isfinite(system.p0)) {
    report.violations.push_back({ErrorCode::InvalidArgument, "p0", "must be finite and >= 0"});
  }
}

}  // namespace

ValidationReport validate(const NetworkConfig& config) {
  ValidationReport report;
  check_system(report, config.system);
  check_positive(report, config.preprocessing.b, "b", ErrorCode::NonPositiveNoise);
  if (config.preprocessing.kind != PreprocessingKind::InverseLinear) {
    check_positive(report, config.preprocessing.gamma, "gamma", ErrorCode::InvalidArgument);
  }
  check_delay(report, config.delays.comm, "tau_c", "c");
  check_delay(report, config.delays.fusion, "tau_f", "f");
  if (config.sensors < 1) {
    report.violations.push_back({ErrorCode::ZeroSensors, "sensors", "must be >= 1"});
  }
  return report;
}

const NetworkConfig& require_valid(const NetworkConfig& config) {
  const auto report = validate(config);
  if (!report.ok()) {
    throw Error(report.violations.front().code, report.summary());
  }
  return config;
}

void require_valid(const ScalarSystem& system) {
  ValidationReport report;
  check_system(report, system);
  if (!report.ok()) {
    throw Error(report.violations.front().code, report.summary());
  }
}

}  // namespace procnet
