#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shapecast/params.hpp"

namespace shapecast::pipeline {

struct RunConfig {
    std::string events;
    std::vector<std::string> forecasts;
    std::vector<std::string> benchmarks;
    std::string out_dir;
    std::optional<int> train_end;
    std::optional<int> first_train_end;  // coverage range override
    std::optional<int> last_train_end;
    ModelParams params;
    int workers = 1;
    CoordMode coords = CoordMode::normalized;
    bool relax = false;
    bool correlation = false;
    int correlation_step = 1;
};

// One `key = value` assignment; shared by the config file and CLI flags so
// precedence is just application order (defaults, then file, then flags).
void set_key(RunConfig& config, const std::string& key, const std::string& value);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

void run_detect(const RunConfig& config, std::ostream& log);
void run_forecast(const RunConfig& config, std::ostream& log);
void run_evaluate(const RunConfig& config, std::ostream& log);
void run_coverage(const RunConfig& config, std::ostream& log);
// Returns false when any regression value drifts beyond tolerance.
bool run_toy_verify(std::ostream& out);

}  // namespace shapecast::pipeline

namespace shapecast::toy {
struct Report;
}

namespace shapecast::pipeline {
// Checker behind run_toy_verify, split out so a perturbed report can be fed
// through as a negative control.
bool check_toy_report(const shapecast::toy::Report& report, std::ostream& out);
}  // namespace shapecast::pipeline
