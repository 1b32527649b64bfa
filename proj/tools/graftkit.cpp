// graftkit: run, validate, sweep and inspect grafting pipelines.

#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "graftkit/config.hpp"
#include "graftkit/error.hpp"
#include "graftkit/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

graftkit::RunConfig load(const std::string& path, const std::vector<std::string>& overrides,
                         const std::string& output_dir) {
    auto all = overrides;
    if (!output_dir.empty()) all.push_back("output_dir=" + nlohmann::json(fs::absolute(output_dir).string()).dump());
    return graftkit::load_run_config_or_throw(path, all);
}

void print_report(const graftkit::RunReport& r) {
    for (const auto& s : r.stages) std::cout << (s.cached ? "cached  " : "ran     ") << s.name << "\n";
    std::cout << "output: " << r.output_dir.string() << "\nconfig_hash: " << r.config_hash << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Template mining and LLM filling for minority-class training data"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")->capture_default_str();

    std::string config;
    std::vector<std::string> overrides;
    std::string output_dir;

    auto* run = app.add_subcommand("run", "Run every stage of the configured method");
    run->add_option("-c,--config", config, "JSON run config")->required()->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Override a config field, e.g. task.k_percent=50");
    run->add_option("-o,--output-dir", output_dir, "Override output_dir");

    auto* validate = app.add_subcommand("validate", "Check a config and list every problem");
    validate->add_option("-c,--config", config, "JSON run config")->required()->check(CLI::ExistingFile);
    validate->add_option("--set", overrides, "Override a config field");

    auto* sweep = app.add_subcommand("sweep", "Run the k_percent x template_count grid");
    sweep->add_option("-c,--config", config, "JSON run config")->required()->check(CLI::ExistingFile);
    sweep->add_option("--set", overrides, "Override a config field");
    sweep->add_option("-o,--output-dir", output_dir, "Override output_dir");

    std::string artifact;
    auto* inspect = app.add_subcommand("inspect", "Summarize an artifact, run directory or dataset bundle");
    inspect->add_option("artifact", artifact, "Path to inspect")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    spdlog::set_default_logger(spdlog::stderr_color_mt("graftkit"));
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*validate) {
            auto result = graftkit::load_run_config(config, overrides);
            if (!result.config) {
                for (const auto& e : result.errors) std::cerr << e << "\n";
                return graftkit::exit_code(graftkit::ErrorKind::config);
            }
            std::cout << "ok " << result.config->hash() << "\n";
            return 0;
        }
        if (*run) {
            print_report(graftkit::run_pipeline(load(config, overrides, output_dir)));
            return 0;
        }
        if (*sweep) {
            const auto cfg = load(config, overrides, output_dir);
            for (const auto& p : graftkit::run_sweep(cfg)) {
                std::cout << "== " << graftkit::sweep_dir_name(p.k_percent, p.template_count) << "\n";
                print_report(p.report);
            }
            return 0;
        }
        if (*inspect) {
            std::cout << graftkit::inspect(artifact).dump(2) << "\n";
            return 0;
        }
    } catch (const graftkit::Error& e) {
        spdlog::error("{}", e.what());
        return graftkit::exit_code(e.kind());
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        return graftkit::exit_code(graftkit::ErrorKind::data);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
