#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "insider/valuation.hpp"

namespace insider::cli {

/// Raised for malformed or invalid scenario files; the message names the
/// offending field path.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::size_t paths_dump = 0;
    std::optional<std::string> out_dir;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitRejected = 2;
inline constexpr int kExitIo = 3;

inline constexpr int kReportSchemaVersion = 1;

/// Applies overrides, simulates, and writes report.json, summary.csv and
/// (with paths_dump > 0) paths.csv into the output directory.
int run(Scenario scenario, const RunOptions& opts);

/// FNV-1a of the canonical JSON form of the scenario.
std::string scenario_hash(const Scenario& scenario);

}  // namespace insider::cli
