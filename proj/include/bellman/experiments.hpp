#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellman {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key=value experiment description. Unknown keys for the selected
/// experiment are rejected at parse time.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> fields;
    std::string raw_text;  // hashed into the manifest

    bool has(const std::string& key) const { return fields.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& def) const;
    std::vector<int> get_int_list(const std::string& key,
                                  const std::vector<int>& def) const;
};

/// Parses a config document for the given experiment kind. `experiment` may
/// also be set inside the document; a mismatch is an error.
ExperimentConfig parse_config(const std::string& text, const std::string& kind);
ExperimentConfig config_for(const std::string& kind);  // built-in defaults

bool is_known_experiment(const std::string& kind);
std::vector<std::string> known_experiments();

struct RunResult {
    int exit_code = 0;
    int checks_passed = 0;
    int checks_failed = 0;
    std::vector<std::string> outputs;  // files written, relative to out_dir
};

/// Dispatches to the named experiment, writes its CSVs plus manifest.txt
/// into out_dir. Bound violations are recorded as data; they only change the
/// exit code when the config sets assert_checks = true.
RunResult run_experiment(const ExperimentConfig& config,
                         std::uint64_t master_seed,
                         const std::filesystem::path& out_dir, int jobs = 1);

/// Runs fn(0..n-1) on up to `jobs` workers. Results must be written to
/// preallocated per-index slots; aggregation order is then deterministic.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace bellman
