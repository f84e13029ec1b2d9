#pragma once

#include <string>
#include <variant>
#include <vector>

#include "procnet/error.hpp"

namespace procnet {

/// Scalar LTI plant dx = a x dt + dw with process-noise intensity sigma2_w.
/// mu0 and p0 only seed the simulator; steady-state results ignore them.
struct ScalarSystem {
  double a = 0.0;
  double sigma2_w = 1.0;
  double mu0 = 0.0;
  double p0 = 0.0;

  bool operator==(const ScalarSystem&) const = default;
};

enum class PreprocessingKind { InverseLinear, InversePower, Exponential };

/// Measurement-noise law as a function of the preprocessing delay:
///   InverseLinear  b / tau
///   InversePower   b / tau^gamma
///   Exponential    b * exp(-gamma * tau)
/// gamma is carried for every kind but only read by the last two.
struct PreprocessingModel {
  PreprocessingKind kind = PreprocessingKind::InverseLinear;
  double b = 1.0;
  double gamma = 1.0;

  bool operator==(const PreprocessingModel&) const = default;
};

struct NoDelay {
  bool operator==(const NoDelay&) const = default;
};

struct ConstantDelay {
  double value = 0.0;
  bool operator==(const ConstantDelay&) const = default;
};

/// Delay that shrinks with preprocessing: coeff / tau.
struct CompressingDelay {
  double coeff = 0.0;
  bool operator==(const CompressingDelay&) const = default;
};

using DelayLaw = std::variant<NoDelay, ConstantDelay, CompressingDelay>;

/// Communication delay is paid once (sensors transmit in parallel); the fusion
/// law is per sensor and is summed over the sensors in use.
struct DelayModel {
  DelayLaw comm = NoDelay{};
  DelayLaw fusion = NoDelay{};

  bool operator==(const DelayModel&) const = default;
};

/// Homogeneous network: every sensor shares the preprocessing and delay laws,
/// and the measurement matrix is the all-ones column of length `sensors`.
struct NetworkConfig {
  ScalarSystem system;
  PreprocessingModel preprocessing;
  DelayModel delays;
  int sensors = 1;

  bool operator==(const NetworkConfig&) const = default;
};

struct DelayBreakdown {
  double tau_p = 0.0;
  double tau_c = 0.0;
  double tau_s = 0.0;
  double tau_f_tot = 0.0;
  double tau_tot = 0.0;
};

/// total = estimation_part (projected filter variance) + noise_part
/// (process noise accumulated over the delay window).
struct VarianceBreakdown {
  double estimation_part = 0.0;
  double noise_part = 0.0;
  double total = 0.0;
  DelayBreakdown delays;
};

struct Violation {
  ErrorCode code;
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const NetworkConfig& config);

/// Returns `config` unchanged or throws an Error carrying the first violation
/// code and the full violation list in its message.
const NetworkConfig& require_valid(const NetworkConfig& config);

void require_valid(const ScalarSystem& system);

std::string_view to_string(PreprocessingKind kind);

}  // namespace procnet
