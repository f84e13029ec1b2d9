#include "procnet/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace procnet {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>, std::less<>> kSchema = {
    {"system", {"a", "sigma2_w", "mu0", "p0"}},
    {"preprocessing", {"kind", "b", "gamma"}},
    {"delays", {"comm_kind", "tau_c", "c", "fusion_kind", "tau_f", "f"}},
    {"network", {"sensors"}},
};

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::ConfigParse, message); }

class SectionReader {
 public:
  SectionReader(const pt::ptree& root, std::string section) : section_(std::move(section)) {
    if (auto child = root.get_child_optional(section_)) node_ = &*child;
  }

  std::optional<std::string> text(const std::string& key) const {
    if (node_ == nullptr) return std::nullopt;
    if (auto value = node_->get_optional<std::string>(key)) return *value;
    return std::nullopt;
  }

  std::string required_text(const std::string& key) const {
    auto value = text(key);
    if (!value) fail("missing required key '" + key + "' in section [" + section_ + "]");
    return *value;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    auto value = text(key);
    if (!value) {
      if (fallback) return *fallback;
      fail("missing required key '" + key + "' in section [" + section_ + "]");
    }
    return parse_double(key, *value);
  }

 private:
  double parse_double(const std::string& key, const std::string& raw) const {
    double out = 0.0;
    const char* first = raw.data();
    const char* last = raw.data() + raw.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
      fail("key '" + key + "' in section [" + section_ + "]: not a number: '" + raw + "'");
    }
    return out;
  }

  std::string section_;
  const pt::ptree* node_ = nullptr;
};

PreprocessingKind parse_kind(const std::string& raw) {
  if (raw == "inverse_linear") return PreprocessingKind::InverseLinear;
  if (raw == "inverse_power") return PreprocessingKind::InversePower;
  if (raw == "exponential") return PreprocessingKind::Exponential;
  fail("key 'kind': expected inverse_linear, inverse_power or exponential, got '" + raw + "'");
}

DelayLaw parse_delay(const SectionReader& delays, const std::string& kind_key, const std::string& constant_key,
                     const std::string& compressing_key) {
  const std::string kind = delays.text(kind_key).value_or("none");
  if (kind == "none") return NoDelay{};
  if (kind == "constant") return ConstantDelay{delays.number(constant_key)};
  if (kind == "compressing") return CompressingDelay{delays.number(compressing_key)};
  fail("key '" + kind_key + "': expected none, constant or compressing, got '" + kind + "'");
}

void check_schema(const pt::ptree& root) {
  for (const auto& [section, node] : root) {
    auto known = kSchema.find(section);
    if (known == kSchema.end()) {
      if (node.empty()) fail("key '" + section + "' outside of any section");
      fail("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : node) {
      if (!known->second.contains(key)) fail("unknown key '" + key + "' in section [" + section + "]");
    }
  }
}

std::string format_number(double value) {
  std::array<char, 64> buffer{};
  std::snprintf(buffer.data(), buffer.size(), "%.17g", value);
  return buffer.data();
}

void write_delay(std::ostringstream& out, const DelayLaw& law, const char* kind_key, const char* constant_key,
                 const char* compressing_key) {
  if (const auto* constant = std::get_if<ConstantDelay>(&law)) {
    out << kind_key << " = constant\n" << constant_key << " = " << format_number(constant->value) << '\n';
  } else if (const auto* compressing = std::get_if<CompressingDelay>(&law)) {
    out << kind_key << " = compressing\n" << compressing_key << " = " << format_number(compressing->coeff) << '\n';
  } else {
    out << kind_key << " = none\n";
  }
}

}  // namespace

NetworkConfig parse_config(std::string_view text) {
  pt::ptree root;
  std::istringstream stream{std::string(text)};
  try {
    pt::read_ini(stream, root);
  } catch (const pt::ini_parser_error& e) {
    fail(e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  check_schema(root);

  const SectionReader system(root, "system");
  const SectionReader preprocessing(root, "preprocessing");
  const SectionReader delays(root, "delays");
  const SectionReader network(root, "network");

  NetworkConfig config;
  config.system.a = system.number("a");
  config.system.sigma2_w = system.number("sigma2_w");
  config.system.mu0 = system.number("mu0", 0.0);
  config.system.p0 = system.number("p0", 0.0);

  config.preprocessing.kind = parse_kind(preprocessing.required_text("kind"));
  config.preprocessing.b = preprocessing.number("b");
  if (config.preprocessing.kind == PreprocessingKind::InverseLinear) {
    config.preprocessing.gamma = preprocessing.number("gamma", 1.0);
  } else {
    config.preprocessing.gamma = preprocessing.number("gamma");
  }

  config.delays.comm = parse_delay(delays, "comm_kind", "tau_c", "c");
  config.delays.fusion = parse_delay(delays, "fusion_kind", "tau_f", "f");

  const std::string sensors = network.required_text("sensors");
  int count = 0;
  auto [ptr, ec] = std::from_chars(sensors.data(), sensors.data() + sensors.size(), count);
  if (ec != std::errc{} || ptr != sensors.data() + sensors.size()) {
    fail("key 'sensors' in section [network]: not an integer: '" + sensors + "'");
  }
  config.sensors = count;
  return config;
}

NetworkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_config_text(const NetworkConfig& config) {
  std::ostringstream out;
  out << "[system]\n"
      << "a = " << format_number(config.system.a) << '\n'
      << "sigma2_w = " << format_number(config.system.sigma2_w) << '\n'
      << "mu0 = " << format_number(config.system.mu0) << '\n'
      << "p0 = " << format_number(config.system.p0) << "\n\n";
  out << "[preprocessing]\n"
      << "kind = " << to_string(config.preprocessing.kind) << '\n'
      << "b = " << format_number(config.preprocessing.b) << '\n'
      << "gamma = " << format_number(config.preprocessing.gamma) << "\n\n";
  out << "[delays]\n";
  write_delay(out, config.delays.comm, "comm_kind", "tau_c", "c");
  write_delay(out, config.delays.fusion, "fusion_kind", "tau_f", "f");
  out << "\n[network]\n"
      << "sensors = " << config.sensors << '\n';
  return out.str();
}

std::uint64_t config_digest(const NetworkConfig& config) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char ch : to_config_text(config)) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace procnet
