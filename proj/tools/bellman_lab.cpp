// Command-line front end for the Bellman operator laboratory. Every
// subcommand reads a flat key=value config, runs one experiment, and writes
// CSV outputs plus a manifest into --out.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bellman/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw bellman::ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct CommonOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int jobs = 1;
};

void attach(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path,
                    "key=value config file (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "master seed for all randomness");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--jobs", opts.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-programming laboratory for softened Bellman backups"};
    app.require_subcommand(1);

    std::vector<std::pair<CLI::App*, CommonOptions>> commands;
    commands.reserve(bellman::known_experiments().size());
    for (const auto& kind : bellman::known_experiments()) {
        auto* cmd = app.add_subcommand(kind);
        commands.emplace_back(cmd, CommonOptions{});
        attach(cmd, commands.back().second);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto& [cmd, opts] = commands[i];
        if (!cmd->parsed()) continue;
        const std::string kind = bellman::known_experiments()[i];
        try {
            const bellman::ExperimentConfig cfg =
                opts.config_path.empty()
                    ? bellman::config_for(kind)
                    : bellman::parse_config(read_file(opts.config_path), kind);
            const bellman::RunResult res = bellman::run_experiment(
                cfg, opts.seed, opts.out_dir, opts.jobs);
            std::cout << kind << ": " << res.checks_passed << " checks passed, "
                      << res.checks_failed << " failed; wrote "
                      << res.outputs.size() << " files to " << opts.out_dir
                      << '\n';
            return res.exit_code;
        } catch (const bellman::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 3;
        }
    }
    return 0;
}
