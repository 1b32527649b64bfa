#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graftkit/corpus.hpp"
#include "graftkit/scoring.hpp"

namespace graftkit {

/// One position of a template: a kept word (surface set) or a blank.
struct Slot {
    std::size_t word_index = 0;
    std::optional<std::string> surface;

    bool kept() const { return surface.has_value(); }
    bool operator==(const Slot&) const = default;
};

struct Template {
    std::string origin_id;
    std::vector<Slot> slots;  // original word order
    double potential = 0.0;   // mean delta_p over the kept words
    std::size_t kept_count = 0;
    double k_percent = 0.0;
    std::string mask_token = "_";

    /// Slot surfaces joined by single spaces, blanks rendered as the mask token.
    std::string render() const;
    std::vector<std::size_t> kept_indices() const;
    std::size_t blank_count() const { return slots.size() - kept_count; }
};

/// ceil(k_percent * n / 100), clamped to [1, n]. The product is taken before
/// the division so integral percentages give exact counts.
std::size_t top_count(std::size_t n, double percent);

struct TemplatePotential {
    double potential = 0.0;
    std::vector<std::size_t> kept_indices;  // ascending positions into the input
};

/// Mean of the m = top_count(|delta_p|, k_percent) largest values; ties go to the earlier index.
/// At k_percent = 100 this is the plain mean over all words.
TemplatePotential template_potential(std::span<const double> delta_p, double k_percent);
TemplatePotential template_potential(std::span<const WordPotential> potentials, double k_percent);

/// Keep the top-K% words of `doc` by delta_p, blank every other word (one
/// mask per word, runs never merged).
Template create_template(const Document& doc, std::span<const WordPotential> potentials, const TaskSpec& task);

/// Same kept count and potential as create_template, but the kept positions
/// are drawn uniformly at random from a stream derived from (seed, doc id).
Template random_mask_template(const Document& doc, std::span<const WordPotential> potentials, const TaskSpec& task,
                              std::uint64_t seed);

/// Highest potential first; equal potentials ordered by origin_id.
void sort_by_potential(std::vector<Template>& templates);

/// The top_count(|templates|, n_percent) templates by potential, sorted descending.
std::vector<Template> rank_and_select(std::vector<Template> templates, double n_percent);

/// The `count` best templates (or all if fewer), sorted descending.
std::vector<Template> select_top(std::vector<Template> templates, std::size_t count);

enum class Masking { potential, random };

struct TemplateBuild {
    std::vector<Template> templates;  // corpus order
    std::vector<SkippedDocument> skipped;
};

/// Builds a template per scored document, in parallel.
TemplateBuild build_templates(const Corpus& corpus, const ScoredCorpus& scored, const TaskSpec& task,
                              Masking masking, std::uint64_t seed, int parallelism);

/// Single-threaded reference for build_templates.
TemplateBuild build_templates_serial(const Corpus& corpus, const ScoredCorpus& scored, const TaskSpec& task,
                                     Masking masking, std::uint64_t seed);

}  // namespace graftkit
