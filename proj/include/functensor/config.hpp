#pragma once

#include "functensor/training.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace functensor {

/// 64-bit FNV-1a of `text`, as 16 hex digits.
[[nodiscard]] std::string digest_hex(std::string_view text);

/// Parses flat `key = value` lines ('#' comments allowed) over the TrainConfig
/// field names. Unknown keys and malformed values throw ConfigError.
[[nodiscard]] TrainConfig parse_train_config(std::string_view text, TrainConfig base = {});

/// Reads a config file; a missing or unreadable file throws ConfigError.
[[nodiscard]] TrainConfig load_train_config(const std::filesystem::path& path,
                                            TrainConfig base = {});

/// Canonical key=value rendering; parse_train_config(to_text(c)) == c.
/// `threads` is omitted since it does not affect results.
[[nodiscard]] std::string train_config_to_text(const TrainConfig& cfg);

}  // namespace functensor
