#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/correlator.hpp"
#include "corrcast/forecast.hpp"

namespace corrcast::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Everything a command needs. Filled from the config file first, then
/// overridden by command-line flags.
struct RunConfig {
    std::string command;
    std::optional<std::filesystem::path> data;
    std::optional<std::filesystem::path> info;
    std::filesystem::path out = ".";
    std::optional<std::filesystem::path> test;
    std::optional<std::filesystem::path> forecasts;
    std::optional<std::filesystem::path> provenance;
    std::optional<std::filesystem::path> benchmark;
    std::optional<std::filesystem::path> exclusions;

    bool correlator_enabled = true;
    CorrelatorParams correlator;
    std::vector<std::string> members{"naive", "ses", "custom"};
    std::vector<std::filesystem::path> external_forecast_paths;
    std::optional<Index> horizon;
    Index seasonality = 0; ///< 0: per-frequency default
    unsigned threads = 1;

    double audit_threshold = 0.995;
    Index bin_width = 100;
    Index edge = 14;

    std::vector<double> r_thresholds{0.9999, 0.999, 0.99};
    std::vector<std::optional<double>> std_ratios{2.0, 2.5, 3.0, std::nullopt};

    std::optional<Method> only_method;
    bool no_timestamp = false;
};

/// Keys accepted in a config file.
const std::vector<std::string>& config_keys();

/// Applies `key = value` lines (# comments, blank lines allowed) onto cfg.
/// Unknown keys raise ConfigError listing the valid ones.
void apply_config_text(RunConfig& cfg, std::istream& in, const std::string& source = "<config>");
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

int cmd_forecast(const RunConfig& cfg, std::ostream& out);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_audit(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);

/// Parses arguments and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace corrcast::cli
