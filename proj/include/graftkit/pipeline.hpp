#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "graftkit/config.hpp"

namespace graftkit {

// Stamps under <output_dir>/.stages/<stage>.json record the stage key and the
// sha256 of every output. A stage is fresh when the key matches and every
// output still hashes to its recorded value.
class StageCache {
public:
    explicit StageCache(std::filesystem::path output_dir);

    /// sha256 over the stage name, the config subtree and the input file hashes.
    static std::string key(const std::string& stage, const nlohmann::json& subtree,
                           const std::vector<std::filesystem::path>& inputs);

    bool fresh(const std::string& stage, const std::string& key,
               const std::vector<std::filesystem::path>& outputs) const;
    void record(const std::string& stage, const std::string& key, const std::vector<std::filesystem::path>& outputs);

private:
    std::filesystem::path stamp_path(const std::string& stage) const;
    std::filesystem::path dir_;
};

struct StageStatus {
    std::string name;
    bool cached = false;
};

struct RunReport {
    std::filesystem::path output_dir;
    std::string config_hash;
    std::vector<StageStatus> stages;
    nlohmann::json manifest;  // contents of manifest.json

    bool all_cached() const;
};

/// Runs every stage of cfg.method in order, skipping stages whose stamps are
/// fresh. Backend failures are rethrown with the stage name prepended.
RunReport run_pipeline(const RunConfig& cfg);

struct SweepPoint {
    double k_percent = 0.0;
    std::optional<std::size_t> template_count;
    RunReport report;
};

/// One run per (k_percent, template_count) pair under <output_dir>/sweep/,
/// named k<K> or k<K>_t<T>. The scoring cache is shared across points.
std::vector<SweepPoint> run_sweep(const RunConfig& cfg);

/// Copy of `cfg` with k_percent / template_count replaced and `effective` rebuilt.
RunConfig sweep_variant(const RunConfig& cfg, double k_percent, std::optional<std::size_t> template_count,
                        const std::filesystem::path& output_dir);

std::string sweep_dir_name(double k_percent, std::optional<std::size_t> template_count);

/// Re-runs fill validation on every graft-method record of <run_dir>/grafted.jsonl
/// against <run_dir>/selected.jsonl, using the rules in <run_dir>/manifest.json.
/// Returns {checked, failed, failures: [{origin_id, reason}]}.
nlohmann::json revalidate_grafted(const std::filesystem::path& run_dir);

/// Summary of an artifact file or a dataset / run directory. grafted.jsonl is
/// re-validated against a sibling selected.jsonl when one exists.
nlohmann::json inspect(const std::filesystem::path& path);

}  // namespace graftkit
