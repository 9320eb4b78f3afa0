#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gasketlab {
namespace harness {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct AssertionFailure : std::runtime_error {
    explicit AssertionFailure(const std::string& m) : std::runtime_error(m) {}
};

struct ExperimentConfig {
    int level = 4;
    double epsilon = 0.1;
    uint64_t seed = 7;
    int resolution = 20;
    std::string out_dir = ".";
    std::string format = "json";  // json | csv | svg
    std::string point;            // lattice point "a,b" for evaluation endpoints
};

/// Serialized config + content hash, embedded into every report.
std::string config_json(const ExperimentConfig& cfg, const std::string& command);

/// Runs one subcommand; writes artifacts under cfg.out_dir and returns the
/// process exit status (nonzero when an assertion failed).
int run(const std::string& command, const std::string& action, const ExperimentConfig& cfg);

/// Full battery: every module operation at least once, with the coverage
/// registry asserted at the end.
int run_all(const ExperimentConfig& cfg);

}  // namespace harness
}  // namespace gasketlab
