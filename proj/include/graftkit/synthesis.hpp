#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graftkit/backend.hpp"
#include "graftkit/scoring.hpp"
#include "graftkit/templating.hpp"

namespace graftkit {

struct GeneratorMeta {
    std::string model;
    std::optional<std::uint64_t> seed;
    double temperature = 1.0;
};

/// A generated training text. Grafted texts carry their template's origin and
/// potential; direct-synthesis baselines leave those empty.
struct GraftedText {
    std::string text;
    std::string label;
    std::optional<std::string> origin_id;
    std::optional<double> template_potential;
    int attempts = 1;
    GeneratorMeta generator_meta;
    std::string method = "graft";
};

enum class FillFailure { none, empty, mask_remains, kept_word_missing, length_out_of_band };

std::string_view to_string(FillFailure f);

struct ValidationRules {
    double min_length_ratio = 0.5;
    double max_length_ratio = 2.0;
};

struct ValidationResult {
    FillFailure failure = FillFailure::none;
    bool ok() const { return failure == FillFailure::none; }
};

/// Last line of every fill prompt before the template.
inline constexpr std::string_view kFillOutputRule = "Return only the completed text.";

/// "Fill in the blanks in the template to produce a <label> <style>.", the
/// output rule, then "Template: <rendered template>".
std::string build_fill_prompt(const Template& tmpl, const TaskSpec& task);

/// Pass iff the candidate (a) contains no mask token, (b) contains every kept
/// word in order (case-insensitive word subsequence), and (c) has a word count
/// within [min, max] times the template's slot count.
ValidationResult validate_filled(const Template& tmpl, std::string_view candidate, const ValidationRules& rules = {});

struct FillPolicy {
    int max_attempts = 3;
    int max_tokens = 256;
    double temperature = 1.0;
    std::optional<std::uint64_t> seed;
    ValidationRules rules;
};

struct FillOutcome {
    std::optional<GraftedText> grafted;
    FillFailure last_failure = FillFailure::none;
    int attempts = 0;
};

/// Request fills until one validates or policy.max_attempts is spent. With a
/// seed, attempt k of template t uses derive_seed(seed, t.origin_id, k).
FillOutcome fill_template(const Template& tmpl, const TaskSpec& task, GenerationBackend& backend,
                          const FillPolicy& policy);

struct DroppedItem {
    std::string id;
    std::string reason;
    int attempts = 0;
};

struct GraftResult {
    std::vector<GraftedText> texts;  // input order
    std::vector<DroppedItem> dropped;
    bool high_drop_rate = false;  // more than half the inputs dropped
};

/// Fill every template concurrently; results keep the template order.
GraftResult graft_run(std::span<const Template> templates, const TaskSpec& task, GenerationBackend& backend,
                      const FillPolicy& policy, int parallelism);

}  // namespace graftkit
