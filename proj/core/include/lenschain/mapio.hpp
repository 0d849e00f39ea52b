#pragma once

// Text config for a single map:
//   N   = 3
//   A_L = 0, 1, 0, 1, 0, 1, 28/87, 0, 0     (row-major; "p/q" allowed)
//   A_R = -23/14, 1, 0, 0, 0, 1, 3/2, 0, 0
//   b   = 1, 0, 0
//   mu  = 1                                 (optional)

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lenschain/pwamap.hpp"

namespace lenschain {

struct MapConfig {
    PwaMap map;
    std::optional<double> mu;
};

MapConfig parse_map_config(std::string_view text);
MapConfig load_map_config(const std::filesystem::path& path);

/// Writes values with %.17g so that parse(format(x)) reproduces x bit-for-bit.
std::string format_map_config(const PwaMap& map, std::optional<double> mu = std::nullopt);

/// "%.17g" formatting used by every machine-readable output.
std::string format_double(double x);

/// Reads a whole file; throws ConfigError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace lenschain
