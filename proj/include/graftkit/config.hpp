#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graftkit/backend.hpp"
#include "graftkit/corpus.hpp"
#include "graftkit/dataset.hpp"
#include "graftkit/mock_backend.hpp"
#include "graftkit/openai_backend.hpp"
#include "graftkit/scoring.hpp"
#include "graftkit/scoring_cache.hpp"
#include "graftkit/synthesis.hpp"

namespace graftkit {

enum class Method { graft, zerogen, icg, prompt_mine, dcpmi_mine };
enum class Ablation { none, no_mining, random_masking, mf_icg };

std::string_view to_string(Method m);
std::string_view to_string(Ablation a);

struct BackendConfig {
    std::string kind;  // "mock" or "openai"
    // mock
    MockScorerOptions mock_scorer;
    MockGeneratorOptions mock_generator;
    // openai
    HttpBackendConfig http;
    std::string api_key_env = "OPENAI_API_KEY";
};

struct Seeds {
    std::uint64_t sample = 0;      // corpus downsampling
    std::uint64_t masking = 0;     // random-masking ablation
    std::uint64_t selection = 0;   // no-mining ablation
    std::uint64_t generation = 0;  // fills and direct synthesis
    std::uint64_t negatives = 0;   // raw negative sampling
    std::uint64_t split = 0;       // train/validation split

    nlohmann::json to_json() const;
};

struct RunConfig {
    std::filesystem::path corpus_path;
    std::string corpus_path_text;  // as written in the config
    CorpusFormat corpus_format = CorpusFormat::jsonl;
    std::optional<std::size_t> downsample;

    TaskSpec task{"x", "y"};
    std::optional<std::size_t> template_count;  // overrides n_percent when set

    Method method = Method::graft;
    Ablation ablation = Ablation::none;
    std::optional<BackendConfig> scoring_backend;
    std::optional<BackendConfig> generation_backend;
    Seeds seeds;

    FillPolicy fill;
    double mining_rate_percent = 1.0;
    std::size_t synthesis_count = 1000;
    std::size_t examples_per_prompt = 3;

    std::optional<NegativeStrategy> negative_strategy;  // unset = method default
    double negative_ratio = 1.0;
    double validation_fraction = 0.2;

    std::vector<double> sweep_k_percent;
    std::vector<std::size_t> sweep_template_count;

    std::filesystem::path output_dir;
    std::filesystem::path cache_dir;

    /// Normalized config (defaults filled, paths as written) without output and cache dirs.
    nlohmann::json effective;

    NegativeStrategy effective_negative_strategy() const;
    /// sha256 of effective.dump(); stable across output locations.
    std::string hash() const;
};

struct ConfigResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;  // each starts with the offending field
};

/// Parse and validate. Relative paths resolve against `base_dir`.
ConfigResult parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Read a JSON config file and apply `overrides` ("dotted.path=value"; the
/// value is parsed as JSON, falling back to a plain string).
ConfigResult load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Throws ConfigError listing every problem.
RunConfig load_run_config_or_throw(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Rebuilds the normalized form stored in RunConfig::effective.
nlohmann::json effective_json(const RunConfig& c);

void apply_override(nlohmann::json& j, std::string_view assignment);

std::shared_ptr<ScoringBackend> make_scoring_backend(const BackendConfig& cfg,
                                                     std::shared_ptr<ScoringCache> cache = nullptr);
std::shared_ptr<GenerationBackend> make_generation_backend(const BackendConfig& cfg);

}  // namespace graftkit
