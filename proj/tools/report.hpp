#pragma once

// Run configuration, report assembly and rendering behind the command-line driver.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace horn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInapplicable = 3;
inline constexpr int kExitVerification = 4;
inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Emit { Json, Latex, Text };

struct RunConfig {
    std::string g2 = "0";
    std::string g3 = "0";
    std::string kappa = "1";
    std::string chart = "covariant";
    std::string field = "minkowski";
    std::string hamilton_case = "general";
    Emit emit = Emit::Json;
    double tolerance = 1e-6;
    std::uint64_t seed = 1;
    int points = 3;
    std::size_t expr_limit = 2000;  // expressions whose printed tree exceeds this many nodes are summarized
    std::string out;
};

/// Strict key=value reader. Sections [model] (g2, g3, kappa, chart) and [run] (field, case,
/// emit, tol, seed, points, expr_limit, out); keys may also appear before any section.
/// Unknown sections or keys, duplicates and malformed values raise ConfigError.
RunConfig read_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

/// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
void set_option(RunConfig& cfg, const std::string& key, const std::string& value);

struct Outcome {
    nlohmann::ordered_json report;
    std::vector<std::pair<std::string, std::string>> equations;  // (label, LaTeX) for --emit latex
    int exit_code = kExitOk;
    std::string error;  // set when the command was refused
};

/// Runs "derive", "constraints", "hamiltonian" or "verify".
Outcome run_command(const std::string& command, const RunConfig& cfg);

std::string render(const Outcome& outcome, Emit emit);

}  // namespace horn::cli
