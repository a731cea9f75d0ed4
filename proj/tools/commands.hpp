#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace fatoulab::cli {

// exit codes
inline constexpr int ok = 0;
inline constexpr int failed = 1;
inline constexpr int config_error = 2;
inline constexpr int insufficient = 3;

struct Options {
    std::string config_path;
    std::string out_dir;        // empty: config "output", else "out"
    unsigned precision_bits = 0;  // 0: config, else 128
    unsigned threads = 0;         // 0: config, else 1
};

// Loads the config, applies overrides, sets precision and threads. The returned
// object is the resolved config, with precision_bits / threads / output filled in.
[[nodiscard]] nlohmann::json resolve(const Options& opts);

[[nodiscard]] int construct(const nlohmann::json& config);
[[nodiscard]] int analyze(const nlohmann::json& config);
[[nodiscard]] int verify_baker(const nlohmann::json& config);
[[nodiscard]] int render(const nlohmann::json& config);

}  // namespace fatoulab::cli
