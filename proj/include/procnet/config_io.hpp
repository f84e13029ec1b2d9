#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "procnet/model.hpp"

namespace procnet {

/// INI-style text with sections [system], [preprocessing], [delays] and
/// [network]. Unknown sections or keys raise ErrorCode::ConfigParse, as do
/// missing required keys (the message names the key). The parsed config is
/// not validated; call validate() on the result.
NetworkConfig parse_config(std::string_view text);

NetworkConfig load_config(const std::filesystem::path& path);

/// Canonical text form. parse_config(to_config_text(c)) == c for any config
/// with finite fields.
std::string to_config_text(const NetworkConfig& config);

/// FNV-1a over the canonical text, so it changes iff a parsed field changes.
std::uint64_t config_digest(const NetworkConfig& config);

}  // namespace procnet
