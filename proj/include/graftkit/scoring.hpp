#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graftkit/backend.hpp"
#include "graftkit/corpus.hpp"

namespace graftkit {

/// Target class, corpus style and mining rates. Validated on construction.
class TaskSpec {
public:
    TaskSpec(std::string class_name, std::string style, double k_percent = 25.0, double n_percent = 10.0,
             std::string mask_token = "_", bool mask_punctuation = true);

    const std::string& class_name() const { return class_name_; }
    const std::string& style() const { return style_; }
    /// Share of each document's words kept in its template.
    double k_percent() const { return k_percent_; }
    /// Share of templates selected for filling.
    double n_percent() const { return n_percent_; }
    const std::string& mask_token() const { return mask_token_; }
    /// When false, punctuation words are never masked and do not compete for the top-K% slots.
    bool mask_punctuation() const { return mask_punctuation_; }

    TaskSpec with_k_percent(double k) const;
    TaskSpec with_n_percent(double n) const;

private:
    std::string class_name_;
    std::string style_;
    double k_percent_;
    double n_percent_;
    std::string mask_token_;
    bool mask_punctuation_;
};

struct InstructionPair {
    std::string class_conditioned;  // "Please write a <label> <style>."
    std::string regularization;     // "Please write a <style>."
};

InstructionPair build_prompts(const TaskSpec& task);

struct WordPotential {
    std::size_t word_index = 0;
    double delta_p = 0.0;
    double logp_class = 0.0;
    double logp_reg = 0.0;
};

/// For each word, the indices of the tokens assigned to it. A token goes to
/// the first word it overlaps by at least one byte; tokens overlapping no word
/// (pure whitespace) are dropped. Throws DataError naming any word left with
/// no token.
std::vector<std::vector<std::size_t>> align_tokens_to_words(std::span<const ScoredToken> tokens,
                                                            std::span<const Word> words);

/// Word log-probability per word: sum of its tokens' logprobs.
std::vector<double> word_logprobs(std::span<const ScoredToken> tokens, std::span<const Word> words);

/// Per-word grafting potential: log P(word | class instruction) - log P(word | regularization
/// instruction), both teacher-forced over the full original text.
std::vector<WordPotential> word_potentials(const Document& doc, const TaskSpec& task, ScoringBackend& backend);

struct DocumentScores {
    std::size_t doc_index = 0;  // position in the scored Corpus
    std::string doc_id;
    std::vector<WordPotential> potentials;
};

struct SkippedDocument {
    std::string id;
    std::string reason;
};

struct ScoredCorpus {
    std::vector<DocumentScores> documents;  // corpus order
    std::vector<SkippedDocument> skipped;   // corpus order

    const DocumentScores* find(const std::string& doc_id) const;
};

/// Scores every document concurrently (OpenMP, up to `parallelism` threads).
/// Transport and alignment failures skip the document; fatal backend
/// configuration errors propagate. Output order is corpus order.
ScoredCorpus score_corpus(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend, int parallelism);

/// Single-threaded reference for score_corpus.
ScoredCorpus score_corpus_serial(const Corpus& corpus, const TaskSpec& task, ScoringBackend& backend);

}  // namespace graftkit
