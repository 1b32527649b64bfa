#include "graftkit/synthesis.hpp"

#include <exception>
#include <stdexcept>

#include <omp.h>

#include "graftkit/hash.hpp"

namespace graftkit {

std::string_view to_string(FillFailure f) {
    switch (f) {
    case FillFailure::none: return "none";
    case FillFailure::empty: return "empty";
    case FillFailure::mask_remains: return "mask-remains";
    case FillFailure::kept_word_missing: return "kept-word-missing";
    case FillFailure::length_out_of_band: return "length-out-of-band";
    }
    return "unknown";
}

std::string build_fill_prompt(const Template& tmpl, const TaskSpec& task) {
    if (tmpl.slots.empty()) throw std::invalid_argument("template has no slots");
    std::string p = "Fill in the blanks in the template to produce a " + task.class_name() + " " + task.style() + ".\n";
    p += kFillOutputRule;
    p += "\n\nTemplate: ";
    p += tmpl.render();
    return p;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ValidationResult validate_filled(const Template& tmpl, std::string_view candidate, const ValidationRules& rules) {
    candidate = trim(candidate);
    if (candidate.empty()) return {FillFailure::empty};

    const auto words = tokenize(candidate);
    bool mask_in_kept = false;
    for (const auto& s : tmpl.slots)
        if (s.kept() && s.surface->find(tmpl.mask_token) != std::string::npos) mask_in_kept = true;
    if (mask_in_kept) {
        for (const auto& w : words)
            if (w.surface == tmpl.mask_token) return {FillFailure::mask_remains};
    } else if (candidate.find(tmpl.mask_token) != std::string_view::npos) {
        return {FillFailure::mask_remains};
    }

    std::size_t cursor = 0;
    for (const auto& s : tmpl.slots) {
        if (!s.kept()) continue;
        const std::string want = lower(*s.surface);
        while (cursor < words.size() && lower(words[cursor].surface) != want) ++cursor;
        if (cursor == words.size()) return {FillFailure::kept_word_missing};
        ++cursor;
    }

    const double ratio = static_cast<double>(words.size()) / static_cast<double>(tmpl.slots.size());
    if (ratio < rules.min_length_ratio || ratio > rules.max_length_ratio) return {FillFailure::length_out_of_band};
    return {};
}

FillOutcome fill_template(const Template& tmpl, const TaskSpec& task, GenerationBackend& backend,
                          const FillPolicy& policy) {
    const std::string prompt = build_fill_prompt(tmpl, task);
    FillOutcome out;
    const int cap = std::max(1, policy.max_attempts);
    for (int attempt = 1; attempt <= cap; ++attempt) {
        out.attempts = attempt;
        GenerationRequest req{prompt, policy.max_tokens, policy.temperature, std::nullopt};
        if (policy.seed) req.seed = derive_seed(*policy.seed, tmpl.origin_id, static_cast<std::uint64_t>(attempt));

        std::string candidate;
        try {
            candidate = backend.generate(req);
        } catch (const EmptyCompletionError&) {
            candidate.clear();
        }
        const auto verdict = validate_filled(tmpl, candidate, policy.rules);
        out.last_failure = verdict.failure;
        if (verdict.ok()) {
            GraftedText g;
            g.text = std::string(trim(candidate));
            g.label = task.class_name();
            g.origin_id = tmpl.origin_id;
            g.template_potential = tmpl.potential;
            g.attempts = attempt;
            g.generator_meta = {backend.model_name(), req.seed, policy.temperature};
            out.grafted = std::move(g);
            return out;
        }
    }
    return out;
}

GraftResult graft_run(std::span<const Template> templates, const TaskSpec& task, GenerationBackend& backend,
                      const FillPolicy& policy, int parallelism) {
    if (templates.empty()) throw std::invalid_argument("graft_run needs at least one template");
    const auto n = static_cast<std::ptrdiff_t>(templates.size());
    std::vector<FillOutcome> outcomes(templates.size());
    std::vector<std::exception_ptr> errors(templates.size());
    const int threads = parallelism > 0 ? parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            outcomes[i] = fill_template(templates[i], task, backend, policy);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    GraftResult result;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        if (outcomes[i].grafted) result.texts.push_back(std::move(*outcomes[i].grafted));
        else
            result.dropped.push_back({templates[i].origin_id, std::string(to_string(outcomes[i].last_failure)),
                                      outcomes[i].attempts});
    }
    result.high_drop_rate = result.dropped.size() * 2 > templates.size();
    if (result.high_drop_rate)
        spdlog::warn("{} of {} templates dropped during filling; check the generation backend and prompt",
                     result.dropped.size(), templates.size());
    return result;
}

}  // namespace graftkit
