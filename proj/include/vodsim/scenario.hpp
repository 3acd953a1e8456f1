#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vodsim/engine.hpp"

namespace vodsim {

/// A run configuration plus the batch settings the command-line tool uses.
struct RunOptions {
    RunConfig config;
    unsigned repeats = 1;
    unsigned parallelism = 1;
    std::string out_dir = "out";
    std::string traces_path;  // scripted workload file; empty = generated
};

struct ScenarioKey {
    std::string section;
    std::string key;
    std::string help;
};

/// Every accepted `[section] key`, in file order.
const std::vector<ScenarioKey>& scenario_keys();

/// Applies one `section.key = value` setting; throws ConfigError naming the
/// key on an unknown key or unparsable value.
void apply_setting(RunOptions& options, const std::string& section, const std::string& key, const std::string& value);

/// Reads `[video] [topology] [workload] [strategy] [run]` key = value text.
/// Keys not set keep their current value in `options`.
void apply_scenario_text(RunOptions& options, const std::string& text);
RunOptions parse_scenario_text(const std::string& text);
RunOptions parse_scenario_file(const std::filesystem::path& path);

/// Every key with its current value, in a form `parse_scenario_text` reads back.
std::string format_scenario(const RunOptions& options);

/// Loads `traces_path` into the config when set; then validates it.
void finalize(RunOptions& options);

}  // namespace vodsim
