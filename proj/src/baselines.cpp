#include "graftkit/baselines.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include <omp.h>

#include "graftkit/hash.hpp"
#include "graftkit/rng.hpp"

namespace graftkit {

std::string_view to_string(MiningMethod m) {
    return m == MiningMethod::prompt_confidence ? "prompt_confidence" : "dcpmi";
}

MiningMethod parse_mining_method(std::string_view s) {
    if (s == "prompt_confidence") return MiningMethod::prompt_confidence;
    if (s == "dcpmi") return MiningMethod::dcpmi;
    throw DataError("unknown mining method '" + std::string(s) + "'");
}

std::size_t mining_count(std::size_t n, double rate_percent) {
    if (!(rate_percent > 0.0 && rate_percent <= 100.0)) throw std::invalid_argument("rate_percent must be in (0,100]");
    return top_count(n, rate_percent);
}

namespace {

int threads_for(int parallelism) { return parallelism > 0 ? parallelism : omp_get_max_threads(); }

void rank(std::vector<MinedText>& texts) {
    std::sort(texts.begin(), texts.end(), [](const MinedText& a, const MinedText& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Shared driver for direct-synthesis baselines: item i is generated from
// prompt_for(i) with up to policy.max_attempts tries at empty output.
GraftResult generate_items(GenerationBackend& backend, std::size_t count, const GenerationPolicy& policy,
                           const std::string& label, const std::string& method, const std::string& stream,
                           const std::function<std::string(std::size_t)>& prompt_for, int parallelism) {
    if (count < 1) throw std::invalid_argument("count must be ≥ 1");
    const int cap = std::max(1, policy.max_attempts);
    std::vector<std::optional<GraftedText>> made(count);
    std::vector<int> attempts(count, 0);
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads_for(parallelism))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const std::string prompt = prompt_for(static_cast<std::size_t>(i));
            const std::string item_tag = stream + ":" + std::to_string(i);
            for (int a = 1; a <= cap; ++a) {
                attempts[i] = a;
                GenerationRequest req{prompt, policy.max_tokens, policy.temperature,
                                      derive_seed(policy.seed, item_tag, static_cast<std::uint64_t>(a))};
                std::string text;
                try {
                    text = trimmed(backend.generate(req));
                } catch (const EmptyCompletionError&) {
                }
                if (text.empty()) continue;
                GraftedText g;
                g.text = std::move(text);
                g.label = label;
                g.attempts = a;
                g.generator_meta = {backend.model_name(), req.seed, policy.temperature};
                g.method = method;
                made[i] = std::move(g);
                break;
            }
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    GraftResult result;
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        if (made[i]) result.texts.push_back(std::move(*made[i]));
        else result.dropped.push_back({stream + ":" + std::to_string(i), "empty", attempts[i]});
    }
    result.high_drop_rate = result.dropped.size() * 2 > count;
    return result;
}

}  // namespace

std::string confidence_instruction(const TaskSpec& task, std::string_view text) {
    std::string p = "Does the following " + task.style() + " belong to the class \"" + task.class_name() +
                    "\"? Answer yes or no.\n\n";
    p += task.style();
    p += ": ";
    p += text;
    p += "\n\nAnswer (yes or no):";
    return p;
}

MiningResult prompt_confidence_mine(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend,
                                    double rate_percent, int parallelism) {
    const std::size_t want = mining_count(corpus.size(), rate_percent);
    const auto n = static_cast<std::ptrdiff_t>(corpus.size());
    std::vector<std::optional<double>> scores(corpus.size());
    std::vector<std::string> skip(corpus.size());
    std::vector<std::exception_ptr> fatal(corpus.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads_for(parallelism))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& doc = corpus.documents[i];
        try {
            const auto tokens = backend.score({confidence_instruction(task, doc.text), std::string(kAffirmativeToken)});
            double s = 0.0;
            for (const auto& t : tokens) s += t.logprob;
            scores[i] = s;
        } catch (const BackendError& e) {
            if (e.retryable()) skip[i] = std::string("backend: ") + e.what();
            else fatal[i] = std::current_exception();
        } catch (const DataError& e) {
            skip[i] = std::string("data: ") + e.what();
        } catch (...) {
            fatal[i] = std::current_exception();
        }
    }

    MiningResult result;
    std::vector<MinedText> all;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (fatal[i]) std::rethrow_exception(fatal[i]);
        const auto& doc = corpus.documents[i];
        if (scores[i]) all.push_back({doc.id, doc.text, *scores[i], MiningMethod::prompt_confidence});
        else result.skipped.push_back({doc.id, skip[i]});
    }
    rank(all);
    if (all.size() > want) all.resize(want);
    result.selected = std::move(all);
    return result;
}

MiningResult dcpmi_mine(const Corpus& corpus, const ScoredCorpus& scored, double rate_percent) {
    const std::size_t want = mining_count(corpus.size(), rate_percent);
    MiningResult result;
    result.skipped = scored.skipped;
    std::vector<MinedText> all;
    all.reserve(scored.documents.size());
    for (const auto& ds : scored.documents) {
        const auto& doc = corpus.documents.at(ds.doc_index);
        all.push_back({doc.id, doc.text, template_potential(ds.potentials, 100.0).potential, MiningMethod::dcpmi});
    }
    rank(all);
    if (all.size() > want) all.resize(want);
    result.selected = std::move(all);
    return result;
}

MiningResult dcpmi_mine(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend, double rate_percent,
                        int parallelism) {
    return dcpmi_mine(corpus, score_corpus(corpus, task, backend, parallelism), rate_percent);
}

GraftResult zerogen_generate(const TaskSpec& task, GenerationBackend& backend, std::size_t count, Polarity polarity,
                             const GenerationPolicy& policy, int parallelism) {
    const auto prompts = build_prompts(task);
    const bool in = polarity == Polarity::in_class;
    const std::string prompt = in ? prompts.class_conditioned : prompts.regularization;
    return generate_items(backend, count, policy, in ? task.class_name() : std::string(kOutOfClassLabel), "zerogen",
                          in ? "zerogen:in" : "zerogen:out", [&](std::size_t) { return prompt; }, parallelism);
}

std::string icg_prompt(const TaskSpec& task, std::span<const std::string> exemplars, Polarity polarity) {
    const auto prompts = build_prompts(task);
    std::string p = "Here are some example " + task.style() + " texts:\n\n";
    for (std::size_t i = 0; i < exemplars.size(); ++i)
        p += "Example " + std::to_string(i + 1) + ": " + exemplars[i] + "\n";
    p += "\n";
    p += polarity == Polarity::in_class ? prompts.class_conditioned : prompts.regularization;
    return p;
}

GraftResult icg_generate(const TaskSpec& task, GenerationBackend& backend, std::span<const Document> pool,
                         std::size_t count, std::size_t examples_per_prompt, const GenerationPolicy& policy,
                         Polarity polarity, std::string method, int parallelism) {
    if (pool.empty()) throw std::invalid_argument("in-context generation needs a non-empty exemplar pool");
    const bool in = polarity == Polarity::in_class;
    const std::string stream = method + (in ? ":in" : ":out");
    auto prompt_for = [&](std::size_t i) {
        Rng rng(derive_seed(policy.seed, stream + ":exemplars", i));
        std::vector<std::string> ex;
        for (std::size_t idx : rng.sample_sorted(pool.size(), examples_per_prompt)) ex.push_back(pool[idx].text);
        return icg_prompt(task, ex, polarity);
    };
    return generate_items(backend, count, policy, in ? task.class_name() : std::string(kOutOfClassLabel), method,
                          stream, prompt_for, parallelism);
}

std::vector<Template> random_select(std::span<const Template> templates, std::size_t count, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "random-select"));
    std::vector<Template> out;
    for (std::size_t i : rng.sample_sorted(templates.size(), count)) out.push_back(templates[i]);
    return out;
}

std::vector<Document> origin_documents(const Corpus& corpus, std::span<const Template> templates) {
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < corpus.size(); ++i) by_id.emplace(corpus.documents[i].id, i);
    std::vector<Document> out;
    for (const auto& t : templates) {
        auto it = by_id.find(t.origin_id);
        if (it == by_id.end()) throw DataError("template origin " + t.origin_id + " is not in the corpus");
        out.push_back(corpus.documents[it->second]);
    }
    return out;
}

}  // namespace graftkit
