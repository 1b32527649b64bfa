#include "graftkit/templating.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "graftkit/hash.hpp"
#include "graftkit/rng.hpp"

namespace graftkit {

std::string Template::render() const {
    std::string out;
    for (const auto& s : slots) {
        if (!out.empty()) out.push_back(' ');
        out += s.kept() ? *s.surface : mask_token;
    }
    return out;
}

std::vector<std::size_t> Template::kept_indices() const {
    std::vector<std::size_t> out;
    for (const auto& s : slots)
        if (s.kept()) out.push_back(s.word_index);
    return out;
}

std::size_t top_count(std::size_t n, double percent) {
    if (n == 0) return 0;
    const double raw = std::ceil(percent * static_cast<double>(n) / 100.0 - 1e-9);
    if (raw < 1.0) return 1;
    return std::min(n, static_cast<std::size_t>(raw));
}

TemplatePotential template_potential(std::span<const double> delta_p, double k_percent) {
    if (delta_p.empty()) throw std::invalid_argument("template_potential needs at least one word potential");
    for (double v : delta_p)
        if (!std::isfinite(v)) throw DataError("non-finite word potential");

    std::vector<std::size_t> order(delta_p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delta_p[a] > delta_p[b]; });

    const std::size_t m = top_count(delta_p.size(), k_percent);
    TemplatePotential out;
    out.kept_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(out.kept_indices.begin(), out.kept_indices.end());
    double sum = 0.0;
    for (std::size_t i : out.kept_indices) sum += delta_p[i];
    out.potential = sum / static_cast<double>(m);
    return out;
}

TemplatePotential template_potential(std::span<const WordPotential> potentials, double k_percent) {
    std::vector<double> dp;
    dp.reserve(potentials.size());
    for (const auto& p : potentials) dp.push_back(p.delta_p);
    return template_potential(dp, k_percent);
}

namespace {

bool all_punct(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_punct(static_cast<unsigned char>(c)); });
}

void check_coverage(const Document& doc, std::span<const WordPotential> potentials) {
    if (potentials.size() != doc.words.size())
        throw DataError("document " + doc.id + ": " + std::to_string(potentials.size()) + " potentials for " +
                        std::to_string(doc.words.size()) + " words");
    for (std::size_t i = 0; i < potentials.size(); ++i)
        if (potentials[i].word_index != i)
            throw DataError("document " + doc.id + ": potential " + std::to_string(i) + " is for word " +
                            std::to_string(potentials[i].word_index));
}

// Word positions that compete for the kept slots.
std::vector<std::size_t> eligible_words(const Document& doc, const TaskSpec& task) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < doc.words.size(); ++i)
        if (task.mask_punctuation() || !all_punct(doc.words[i].surface)) out.push_back(i);
    if (out.empty()) throw DataError("document " + doc.id + " has no maskable words");
    return out;
}

Template assemble(const Document& doc, const TaskSpec& task, const std::vector<bool>& keep, double potential) {
    Template t;
    t.origin_id = doc.id;
    t.potential = potential;
    t.k_percent = task.k_percent();
    t.mask_token = task.mask_token();
    t.slots.reserve(doc.words.size());
    for (std::size_t i = 0; i < doc.words.size(); ++i) {
        Slot s{i, std::nullopt};
        if (keep[i]) {
            s.surface = doc.words[i].surface;
            ++t.kept_count;
        }
        t.slots.push_back(std::move(s));
    }
    return t;
}

struct Selection {
    std::vector<bool> keep;
    TemplatePotential tp;
    std::vector<std::size_t> eligible;
};

Selection potential_selection(const Document& doc, std::span<const WordPotential> potentials,
                              const TaskSpec& task) {
    check_coverage(doc, potentials);
    Selection sel;
    sel.eligible = eligible_words(doc, task);
    std::vector<double> dp;
    dp.reserve(sel.eligible.size());
    for (std::size_t i : sel.eligible) dp.push_back(potentials[i].delta_p);
    sel.tp = template_potential(dp, task.k_percent());
    sel.keep.assign(doc.words.size(), !task.mask_punctuation());
    for (std::size_t i : sel.eligible) sel.keep[i] = false;
    return sel;
}

}  // namespace

Template create_template(const Document& doc, std::span<const WordPotential> potentials, const TaskSpec& task) {
    auto sel = potential_selection(doc, potentials, task);
    for (std::size_t k : sel.tp.kept_indices) sel.keep[sel.eligible[k]] = true;
    return assemble(doc, task, sel.keep, sel.tp.potential);
}

Template random_mask_template(const Document& doc, std::span<const WordPotential> potentials, const TaskSpec& task,
                              std::uint64_t seed) {
    auto sel = potential_selection(doc, potentials, task);
    Rng rng(derive_seed(seed, doc.id));
    for (std::size_t k : rng.sample_sorted(sel.eligible.size(), sel.tp.kept_indices.size()))
        sel.keep[sel.eligible[k]] = true;
    return assemble(doc, task, sel.keep, sel.tp.potential);
}

void sort_by_potential(std::vector<Template>& templates) {
    std::sort(templates.begin(), templates.end(), [](const Template& a, const Template& b) {
        if (a.potential != b.potential) return a.potential > b.potential;
        return a.origin_id < b.origin_id;
    });
}

std::vector<Template> select_top(std::vector<Template> templates, std::size_t count) {
    sort_by_potential(templates);
    if (templates.size() > count) templates.resize(count);
    return templates;
}

std::vector<Template> rank_and_select(std::vector<Template> templates, double n_percent) {
    if (templates.empty()) throw std::invalid_argument("rank_and_select needs at least one template");
    const std::size_t count = top_count(templates.size(), n_percent);
    return select_top(std::move(templates), count);
}

namespace {

struct BuildOutcome {
    std::optional<Template> tmpl;
    std::optional<std::string> skip_reason;
    std::exception_ptr fatal;
};

BuildOutcome build_one(const Corpus& corpus, const DocumentScores& ds, const TaskSpec& task, Masking masking,
                       std::uint64_t seed) {
    BuildOutcome out;
    try {
        const auto& doc = corpus.documents.at(ds.doc_index);
        if (doc.id != ds.doc_id) throw DataError("scores for " + ds.doc_id + " do not match document " + doc.id);
        out.tmpl = masking == Masking::potential ? create_template(doc, ds.potentials, task)
                                                 : random_mask_template(doc, ds.potentials, task, seed);
    } catch (const DataError& e) {
        out.skip_reason = e.what();
    } catch (...) {
        out.fatal = std::current_exception();
    }
    return out;
}

TemplateBuild collect(const ScoredCorpus& scored, std::vector<BuildOutcome>& outcomes) {
    TemplateBuild build;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].fatal) std::rethrow_exception(outcomes[i].fatal);
        if (outcomes[i].tmpl) build.templates.push_back(std::move(*outcomes[i].tmpl));
        else build.skipped.push_back({scored.documents[i].doc_id, *outcomes[i].skip_reason});
    }
    return build;
}

}  // namespace

TemplateBuild build_templates(const Corpus& corpus, const ScoredCorpus& scored, const TaskSpec& task,
                              Masking masking, std::uint64_t seed, int parallelism) {
    const auto n = static_cast<std::ptrdiff_t>(scored.documents.size());
    std::vector<BuildOutcome> outcomes(scored.documents.size());
    const int threads = parallelism > 0 ? parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) outcomes[i] = build_one(corpus, scored.documents[i], task, masking, seed);
    return collect(scored, outcomes);
}

TemplateBuild build_templates_serial(const Corpus& corpus, const ScoredCorpus& scored, const TaskSpec& task,
                                     Masking masking, std::uint64_t seed) {
    std::vector<BuildOutcome> outcomes;
    outcomes.reserve(scored.documents.size());
    for (const auto& ds : scored.documents) outcomes.push_back(build_one(corpus, ds, task, masking, seed));
    return collect(scored, outcomes);
}

}  // namespace graftkit
