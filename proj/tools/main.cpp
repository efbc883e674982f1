#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapecast/errors.hpp"
#include "shapecast/pipeline.hpp"

namespace {

using shapecast::pipeline::RunConfig;

struct FlagCapture {
    std::vector<std::pair<std::string, std::string>> assignments;
    std::string config_path;
};

// Every flag funnels through set_key so the CLI, the config file and the
// defaults share one validation path. Precedence: flag > file > default.
void add_common_flags(CLI::App* cmd, FlagCapture& cap) {
    auto capture = [&cap](const std::string& key) {
        return [&cap, key](const std::string& value) { cap.assignments.emplace_back(key, value); };
    };
    cmd->add_option_function<std::string>("--events", capture("events"), "event table CSV");
    cmd->add_option_function<std::string>("--out", capture("out"), "output directory");
    cmd->add_option("--config", cap.config_path, "key = value config file");
    cmd->add_option_function<std::string>("--benchmark", capture("benchmark"),
                                          "benchmark forecast CSV (repeatable)");
    cmd->add_option_function<std::string>("--train-end", capture("train_end"),
                                          "last training month index");
    cmd->add_option_function<std::string>("--first-train-end", capture("first_train_end"),
                                          "first train-end month (coverage/correlation)");
    cmd->add_option_function<std::string>("--last-train-end", capture("last_train_end"),
                                          "last train-end month (coverage/correlation)");
    cmd->add_option_function<std::string>("--workers", capture("workers"), "worker threads");
    cmd->add_option_function<std::string>("--coords", capture("coords"),
                                          "cube coordinates: normalized|raw");
    cmd->add_option_function<std::string>("--relax", capture("relax"),
                                          "threshold relaxation fallback: on|off");
    cmd->add_option_function<std::string>("--thr1", capture("thr1"), "shape distance threshold");
    cmd->add_option_function<std::string>("--thr2", capture("thr2"), "active-ratio threshold");
    cmd->add_option_function<std::string>("--clu-coef", capture("clu_coef"),
                                          "scenario cluster distance coefficient");
    cmd->add_option_function<std::string>("--radius", capture("radius"), "zone chaining radius");
    cmd->add_option_function<std::string>("--input-window", capture("input_window"),
                                          "training window months");
    cmd->add_option_function<std::string>("--horizon", capture("horizon"), "forecast months");
    cmd->add_option_function<std::string>("--stride-frac", capture("stride_frac"),
                                          "rolling window stride fraction");
    cmd->add_option_function<std::string>("--dim-var-frac", capture("dim_var_frac"),
                                          "window dimension variation fraction");
    cmd->add_option_function<std::string>("--min-matches", capture("min_matches"),
                                          "matches required before relaxation");
    cmd->add_option_function<std::string>("--relax-factor", capture("relax_factor"),
                                          "threshold multiplier per relaxation step");
    cmd->add_option_function<std::string>("--max-relax-steps", capture("max_relax_steps"),
                                          "relaxation step limit");
}

RunConfig build_config(const FlagCapture& cap) {
    RunConfig config;
    if (!cap.config_path.empty()) shapecast::pipeline::apply_config_file(config, cap.config_path);
    for (const auto& [key, value] : cap.assignments)
        shapecast::pipeline::set_key(config, key, value);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shapecast: zone detection and shape-matching fatality forecasts"};
    app.require_subcommand(1);

    FlagCapture cap;
    std::function<void()> action;

    CLI::App* detect = app.add_subcommand("detect", "identify active zones");
    add_common_flags(detect, cap);
    detect->callback([&] {
        action = [&] { shapecast::pipeline::run_detect(build_config(cap), std::cerr); };
    });

    CLI::App* forecast = app.add_subcommand("forecast", "run the full forecasting pipeline");
    add_common_flags(forecast, cap);
    forecast->callback([&] {
        action = [&] { shapecast::pipeline::run_forecast(build_config(cap), std::cerr); };
    });

    CLI::App* evaluate = app.add_subcommand("evaluate", "score forecasts against observations");
    add_common_flags(evaluate, cap);
    evaluate->add_option_function<std::string>(
        "--forecast",
        [&cap](const std::string& v) { cap.assignments.emplace_back("forecast", v); },
        "forecast table CSV (repeatable, one per period)");
    evaluate->add_option_function<std::string>(
        "--correlation",
        [&cap](const std::string& v) { cap.assignments.emplace_back("correlation", v); },
        "also emit the pattern/outcome correlation table: on|off");
    evaluate->add_option_function<std::string>(
        "--correlation-step",
        [&cap](const std::string& v) { cap.assignments.emplace_back("correlation_step", v); },
        "sample every Nth train-end month for correlation");
    evaluate->callback([&] {
        action = [&] { shapecast::pipeline::run_evaluate(build_config(cap), std::cerr); };
    });

    CLI::App* coverage = app.add_subcommand("coverage", "zone coverage diagnostic time series");
    add_common_flags(coverage, cap);
    coverage->callback([&] {
        action = [&] { shapecast::pipeline::run_coverage(build_config(cap), std::cerr); };
    });

    CLI::App* toy = app.add_subcommand("toy-verify", "recompute the built-in worked example");
    toy->callback([&] {
        action = [&] {
            if (!shapecast::pipeline::run_toy_verify(std::cout))
                throw shapecast::ValidationError("toy-verify failed");
        };
    });

    CLI11_PARSE(app, argc, argv);

    try {
        action();
        return 0;
    } catch (const shapecast::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
