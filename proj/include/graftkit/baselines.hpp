#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graftkit/corpus.hpp"
#include "graftkit/scoring.hpp"
#include "graftkit/synthesis.hpp"
#include "graftkit/templating.hpp"

namespace graftkit {

enum class MiningMethod { prompt_confidence, dcpmi };

std::string_view to_string(MiningMethod m);
MiningMethod parse_mining_method(std::string_view s);

/// A raw document chosen directly as a pseudo-labeled positive.
struct MinedText {
    std::string doc_id;
    std::string text;
    double score = 0.0;
    MiningMethod method = MiningMethod::dcpmi;
};

struct MiningResult {
    std::vector<MinedText> selected;  // score descending, ties by doc_id
    std::vector<SkippedDocument> skipped;
};

/// ceil(rate% * n), at least 1.
std::size_t mining_count(std::size_t n, double rate_percent);

/// Yes/no question whose "yes" continuation is scored by prompt_confidence_mine.
std::string confidence_instruction(const TaskSpec& task, std::string_view text);
inline constexpr std::string_view kAffirmativeToken = "yes";

/// Ranks documents by log P("yes" | does-this-belong-to-<class> question) and
/// keeps the top rate%. The count is taken over the whole corpus.
MiningResult prompt_confidence_mine(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend,
                                    double rate_percent = 1.0, int parallelism = 0);

/// Score = mean delta_p over every word (template_potential at K = 100).
MiningResult dcpmi_mine(const Corpus& corpus, const ScoredCorpus& scored, double rate_percent);
MiningResult dcpmi_mine(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend, double rate_percent,
                        int parallelism = 0);

enum class Polarity { in_class, out_of_class };

/// Label written on out-of-class generations.
inline constexpr std::string_view kOutOfClassLabel = "out-of-class";

struct GenerationPolicy {
    int max_attempts = 3;  // per item; empty generations are retried up to this cap
    int max_tokens = 256;
    double temperature = 1.0;
    std::uint64_t seed = 0;
};

/// "Please write a <label> <style>." (in-class) or "Please write a <style>."
/// (out-of-class), `count` times with per-item seeds.
GraftResult zerogen_generate(const TaskSpec& task, GenerationBackend& backend, std::size_t count, Polarity polarity,
                             const GenerationPolicy& policy, int parallelism = 0);

/// Exemplar block followed by the class (or regularization) instruction.
std::string icg_prompt(const TaskSpec& task, std::span<const std::string> exemplars, Polarity polarity);

/// In-context generation: each prompt embeds `examples_per_prompt` texts drawn
/// (seeded, without replacement) from `pool`. Fed with mined origin documents
/// this is the mask-filling -> in-context-generation ablation.
GraftResult icg_generate(const TaskSpec& task, GenerationBackend& backend, std::span<const Document> pool,
                         std::size_t count, std::size_t examples_per_prompt, const GenerationPolicy& policy,
                         Polarity polarity = Polarity::in_class, std::string method = "icg", int parallelism = 0);

/// Uniformly random subset of `count` templates (seeded), in input order.
std::vector<Template> random_select(std::span<const Template> templates, std::size_t count, std::uint64_t seed);

/// The documents the templates were cut from, in template order.
std::vector<Document> origin_documents(const Corpus& corpus, std::span<const Template> templates);

}  // namespace graftkit
