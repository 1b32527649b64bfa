#include "graftkit/scoring.hpp"

#include <exception>
#include <stdexcept>

#include <omp.h>

namespace graftkit {

TaskSpec::TaskSpec(std::string class_name, std::string style, double k_percent, double n_percent,
                   std::string mask_token, bool mask_punctuation)
    : class_name_(std::move(class_name)),
      style_(std::move(style)),
      k_percent_(k_percent),
      n_percent_(n_percent),
      mask_token_(std::move(mask_token)),
      mask_punctuation_(mask_punctuation) {
    if (class_name_.empty()) throw ConfigError("class_name must be non-empty");
    if (style_.empty()) throw ConfigError("style must be non-empty");
    if (!(k_percent_ > 0.0 && k_percent_ <= 100.0)) throw ConfigError("k_percent must be in (0,100]");
    if (!(n_percent_ > 0.0 && n_percent_ <= 100.0)) throw ConfigError("n_percent must be in (0,100]");
    if (mask_token_.empty()) throw ConfigError("mask_token must be non-empty");
    for (unsigned char c : mask_token_)
        if (is_space(c)) throw ConfigError("mask_token must not contain whitespace");
}

TaskSpec TaskSpec::with_k_percent(double k) const {
    return TaskSpec(class_name_, style_, k, n_percent_, mask_token_, mask_punctuation_);
}

TaskSpec TaskSpec::with_n_percent(double n) const {
    return TaskSpec(class_name_, style_, k_percent_, n, mask_token_, mask_punctuation_);
}

InstructionPair build_prompts(const TaskSpec& task) {
    return {"Please write a " + task.class_name() + " " + task.style() + ".",
            "Please write a " + task.style() + "."};
}

std::vector<std::vector<std::size_t>> align_tokens_to_words(std::span<const ScoredToken> tokens,
                                                            std::span<const Word> words) {
    std::vector<std::vector<std::size_t>> assigned(words.size());
    std::size_t w = 0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const auto& tok = tokens[t];
        while (w < words.size() && words[w].end <= tok.start) ++w;
        if (w == words.size()) break;
        if (words[w].start < tok.end) assigned[w].push_back(t);
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (assigned[i].empty())
            throw DataError("word " + std::to_string(i) + " '" + words[i].surface + "' has no aligned token");
    }
    return assigned;
}

std::vector<double> word_logprobs(std::span<const ScoredToken> tokens, std::span<const Word> words) {
    const auto assigned = align_tokens_to_words(tokens, words);
    std::vector<double> out(words.size(), 0.0);
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t t : assigned[i]) out[i] += tokens[t].logprob;
    return out;
}

std::vector<WordPotential> word_potentials(const Document& doc, const TaskSpec& task, ScoringBackend& backend) {
    if (doc.words.empty()) throw std::invalid_argument("document " + doc.id + " has no words");
    const auto prompts = build_prompts(task);

    const auto class_tokens = backend.score({prompts.class_conditioned, doc.text});
    check_tiling(class_tokens, doc.text.size());
    const auto reg_tokens = backend.score({prompts.regularization, doc.text});
    check_tiling(reg_tokens, doc.text.size());

    const auto lp_class = word_logprobs(class_tokens, doc.words);
    const auto lp_reg = word_logprobs(reg_tokens, doc.words);

    std::vector<WordPotential> out(doc.words.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].word_index = i;
        out[i].logp_class = lp_class[i];
        out[i].logp_reg = lp_reg[i];
        out[i].delta_p = lp_class[i] - lp_reg[i];
    }
    return out;
}

const DocumentScores* ScoredCorpus::find(const std::string& doc_id) const {
    for (const auto& d : documents)
        if (d.doc_id == doc_id) return &d;
    return nullptr;
}

namespace {

struct Outcome {
    std::vector<WordPotential> potentials;
    std::optional<std::string> skip_reason;
    std::exception_ptr fatal;
};

Outcome score_one(const Document& doc, const TaskSpec& task, ScoringBackend& backend) {
    Outcome out;
    if (doc.words.empty()) {
        out.skip_reason = "no words";
        return out;
    }
    try {
        out.potentials = word_potentials(doc, task, backend);
    } catch (const BackendError& e) {
        if (e.retryable()) out.skip_reason = std::string("backend: ") + e.what();
        else out.fatal = std::current_exception();
    } catch (const DataError& e) {
        out.skip_reason = std::string("data: ") + e.what();
    } catch (...) {
        out.fatal = std::current_exception();
    }
    return out;
}

ScoredCorpus collect(const Corpus& corpus, std::vector<Outcome>& outcomes) {
    ScoredCorpus result;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& o = outcomes[i];
        if (o.fatal) std::rethrow_exception(o.fatal);
        const auto& doc = corpus.documents[i];
        if (o.skip_reason) result.skipped.push_back({doc.id, *o.skip_reason});
        else result.documents.push_back({i, doc.id, std::move(o.potentials)});
    }
    return result;
}

}  // namespace

ScoredCorpus score_corpus(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend, int parallelism) {
    const auto n = static_cast<std::ptrdiff_t>(corpus.size());
    std::vector<Outcome> outcomes(corpus.size());
    const int threads = parallelism > 0 ? parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) outcomes[i] = score_one(corpus.documents[i], task, backend);
    return collect(corpus, outcomes);
}

ScoredCorpus score_corpus_serial(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend) {
    std::vector<Outcome> outcomes;
    outcomes.reserve(corpus.size());
    for (const auto& doc : corpus.documents) outcomes.push_back(score_one(doc, task, backend));
    return collect(corpus, outcomes);
}

}  // namespace graftkit
