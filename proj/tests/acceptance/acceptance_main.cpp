// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "graftkit/artifacts.hpp"
#include "graftkit/baselines.hpp"
#include "graftkit/config.hpp"
#include "graftkit/mock_backend.hpp"
#include "graftkit/pipeline.hpp"
#include "graftkit/rng.hpp"
#include "graftkit/templating.hpp"

using namespace graftkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = GRAFTKIT_SOURCE_DIR;

constexpr double kRuntimeLimitSeconds = 60.0;
constexpr double kDeltaTolerance = 1e-9;
constexpr std::size_t kOracleSampleDocs = 50;
constexpr std::size_t kBruteForceMaxWords = 12;
constexpr std::size_t kBruteForceTrials = 3000;
constexpr std::size_t kLargeCorpusDocs = 10000;
constexpr double kLargeCorpusNPercent = 10.0;
constexpr std::size_t kLargeCorpusCap = 1000;
constexpr double kShifts[] = {2.5, -1.75};
constexpr std::size_t kZeroGenTotal = 2000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_root() { return fs::temp_directory_path() / ("graftkit-acceptance-" + std::to_string(::getpid())); }

fs::path fresh_dir(const std::string& name) {
    const auto p = scratch_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig config_in(const std::string& name, const fs::path& out) {
    return load_run_config_or_throw(kSource / "configs" / (name + ".json"),
                                    {"output_dir=" + json(out.string()).dump(),
                                     "cache_dir=" + json((out / "cache").string()).dump()});
}

double timed_run(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    run_pipeline(c);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Two graft runs in separate directories with separate caches, shared by later checks.
struct GraftRuns {
    fs::path a, b;
    RunConfig cfg;
    double seconds_a = 0, seconds_b = 0;
};

const GraftRuns& graft_runs() {
    static const GraftRuns runs = [] {
        GraftRuns r;
        r.a = fresh_dir("graft-a");
        r.b = fresh_dir("graft-b");
        r.cfg = config_in("graft", r.a);
        r.seconds_a = timed_run(r.cfg);
        r.seconds_b = timed_run(config_in("graft", r.b));
        return r;
    }();
    return runs;
}

Corpus toy_corpus() { return ingest(kSource / "data/toy_corpus.jsonl", CorpusFormat::jsonl); }

std::vector<std::string> split_spaces(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto next = s.find(' ', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

// Integer ceil(k * n / 100) for integral k.
std::size_t ceil_percent(std::size_t k, std::size_t n) { return (k * n + 99) / 100; }

// Max mean over all m-subsets, by enumeration.
double brute_force_max_mean(const std::vector<double>& v, std::size_t m) {
    double best = -INFINITY;
    const std::size_t n = v.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) sum += v[i];
        best = std::max(best, sum / static_cast<double>(m));
    }
    return best;
}

// Per-word sums of raw token logprobs: a token belongs to the first word it overlaps.
std::vector<double> oracle_word_sums(const std::vector<ScoredToken>& tokens, const std::vector<Word>& words) {
    std::vector<double> sums(words.size(), 0.0);
    for (const auto& t : tokens)
        for (std::size_t w = 0; w < words.size(); ++w)
            if (t.start < words[w].end && words[w].start < t.end) {
                sums[w] += t.logprob;
                break;
            }
    return sums;
}

// ---------------------------------------------------------------------------

Outcome determinism() {
    const auto& r = graft_runs();
    std::vector<std::string> differing;
    const std::vector<std::string> files = {"templates.jsonl",     "selected.jsonl",           "grafted.jsonl",
                                            "dataset/train.jsonl", "dataset/validation.jsonl", "dataset/manifest.json"};
    for (const auto& f : files)
        if (!fs::exists(r.a / f) || read_file(r.a / f) != read_file(r.b / f)) differing.push_back(f);
    const double worst = std::max(r.seconds_a, r.seconds_b);
    std::ostringstream d;
    d << files.size() << " files compared, " << differing.size() << " differ; slowest run " << worst
      << " s (limit " << kRuntimeLimitSeconds << " s)";
    for (const auto& f : differing) d << " [" << f << "]";
    return {differing.empty() && worst < kRuntimeLimitSeconds, d.str()};
}

Outcome delta_oracle() {
    const auto& r = graft_runs();
    const auto corpus = toy_corpus();
    const auto stored = scores_from_records(corpus, read_jsonl(r.a / "scores.jsonl"));
    MockScoringBackend raw(r.cfg.scoring_backend->mock_scorer);
    const std::string class_instr =
        "Please write a " + r.cfg.task.class_name() + " " + r.cfg.task.style() + ".";
    const std::string reg_instr = "Please write a " + r.cfg.task.style() + ".";

    Rng rng(20241015);
    const auto sample = rng.sample_sorted(stored.documents.size(), kOracleSampleDocs);
    std::size_t words = 0;
    double worst = 0;
    for (std::size_t k : sample) {
        const auto& ds = stored.documents[k];
        const auto& doc = corpus.documents[ds.doc_index];
        const auto cls = oracle_word_sums(raw.score({class_instr, doc.text}), doc.words);
        const auto reg = oracle_word_sums(raw.score({reg_instr, doc.text}), doc.words);
        if (ds.potentials.size() != doc.words.size()) return {false, "word count mismatch for " + doc.id};
        for (std::size_t w = 0; w < doc.words.size(); ++w) {
            worst = std::max(worst, std::abs((cls[w] - reg[w]) - ds.potentials[w].delta_p));
            ++words;
        }
    }
    std::ostringstream d;
    d << sample.size() << " docs, " << words << " words, max |error| " << worst << " (tol " << kDeltaTolerance
      << ")";
    return {sample.size() == kOracleSampleDocs && worst <= kDeltaTolerance, d.str()};
}

Outcome potential_oracle() {
    std::size_t checked = 0, mismatches = 0;

    // Random values on the mock logprob grid and real mock scores of short documents.
    Rng rng(7);
    for (std::size_t t = 0; t < kBruteForceTrials; ++t) {
        const std::size_t n = 1 + rng.below(kBruteForceMaxWords);
        std::vector<double> v(n);
        for (auto& x : v) x = (static_cast<double>(rng.below(1u << 24)) - (1u << 23)) * kMockLogprobQuantum;
        if (rng.below(4) == 0) v[rng.below(n)] = v[0];  // ties
        const double k = static_cast<double>(1 + rng.below(100));
        const auto got = template_potential(v, k);
        ++checked;
        if (got.potential != brute_force_max_mean(v, top_count(n, k))) ++mismatches;
    }
    const auto& r = graft_runs();
    const auto corpus = toy_corpus();
    const auto stored = scores_from_records(corpus, read_jsonl(r.a / "scores.jsonl"));
    for (const auto& ds : stored.documents) {
        if (ds.potentials.size() > kBruteForceMaxWords) continue;
        std::vector<double> v;
        for (const auto& p : ds.potentials) v.push_back(p.delta_p);
        for (std::size_t k : {25, 50, 75, 100}) {
            ++checked;
            const auto got = template_potential(v, static_cast<double>(k));
            if (got.potential != brute_force_max_mean(v, ceil_percent(k, v.size()))) ++mismatches;
        }
    }

    // kept_count for K in {25, 50, 75, 100} on real documents, and the 0.75 mask ratio at 40 words.
    MockScoringBackend scorer(r.cfg.scoring_backend->mock_scorer);
    std::size_t kept_bad = 0, forty_word_docs = 0;
    bool ratio_ok = true;
    Rng text_rng(11);
    for (std::size_t d = 0; d < 40; ++d) {
        const std::size_t n = d < 20 ? 40 : 1 + text_rng.below(60);
        std::string text;
        for (std::size_t i = 0; i < n; ++i) text += (i ? " w" : "w") + std::to_string(text_rng.below(500));
        const auto doc = make_document("d" + std::to_string(d), text);
        for (std::size_t k : {25, 50, 75, 100}) {
            const TaskSpec task(r.cfg.task.class_name(), r.cfg.task.style(), static_cast<double>(k));
            const auto t = create_template(doc, word_potentials(doc, task, scorer), task);
            if (t.kept_count != ceil_percent(k, n) || t.kept_indices().size() != t.kept_count) ++kept_bad;
            if (k == 25 && n == 40) {
                ++forty_word_docs;
                ratio_ok = ratio_ok && static_cast<double>(t.blank_count()) / static_cast<double>(n) == 0.75;
            }
        }
    }
    std::ostringstream d;
    d << checked << " brute-force comparisons, " << mismatches << " mismatches; kept_count errors " << kept_bad
      << "; mask ratio at K=25 on " << forty_word_docs << " 40-word docs " << (ratio_ok ? "= 0.75" : "!= 0.75");
    return {mismatches == 0 && kept_bad == 0 && ratio_ok && forty_word_docs > 0, d.str()};
}

Outcome dcpmi_equivalence() {
    const auto& r = graft_runs();
    const auto corpus = toy_corpus();
    const auto stored = scores_from_records(corpus, read_jsonl(r.a / "scores.jsonl"));
    const auto mined = dcpmi_mine(corpus, stored, 100.0);
    std::size_t mismatches = 0;
    for (const auto& m : mined.selected) {
        const auto* ds = stored.find(m.doc_id);
        if (!ds) {
            ++mismatches;
            continue;
        }
        if (m.score != template_potential(ds->potentials, 100.0).potential) ++mismatches;
    }
    std::ostringstream d;
    d << mined.selected.size() << " of " << stored.documents.size() << " documents compared, " << mismatches
      << " mismatches";
    return {mismatches == 0 && mined.selected.size() == stored.documents.size(), d.str()};
}

Outcome selection_invariant() {
    // 10,000 synthetic tweets scored by the configured mock scorer.
    const auto& r = graft_runs();
    Rng rng(99);
    static const char* vocab[] = {"wow", "i", "cant", "believe", "this", "when", "luck", "feel", "the", "day",
                                  "omg", "so", "tired", "love", "rain", "coffee", "work", "never", "expect", "lol"};
    Corpus corpus;
    for (std::size_t i = 0; i < kLargeCorpusDocs; ++i) {
        const std::size_t n = 3 + rng.below(20);
        std::string text;
        for (std::size_t w = 0; w < n; ++w) text += std::string(w ? " " : "") + vocab[rng.below(20)];
        if (rng.below(3) == 0) text += "!";
        corpus.documents.push_back(make_document("t" + std::to_string(i), text));
    }
    MockScoringBackend scorer(r.cfg.scoring_backend->mock_scorer);
    const TaskSpec task(r.cfg.task.class_name(), r.cfg.task.style(), 25.0, kLargeCorpusNPercent);
    const auto scored = score_corpus(corpus, task, scorer, 0);
    const auto built = build_templates(corpus, scored, task, Masking::potential, 0, 0);

    bool ok = true;
    std::ostringstream d;
    for (double n_percent : {1.0, 2.5, kLargeCorpusNPercent, 33.0}) {
        const auto sel = rank_and_select(built.templates, n_percent);
        const auto expected =
            static_cast<std::size_t>(std::ceil(n_percent * static_cast<double>(built.templates.size()) / 100.0 - 1e-9));
        std::set<std::string> chosen;
        double min_selected = INFINITY;
        for (const auto& t : sel) {
            chosen.insert(t.origin_id);
            min_selected = std::min(min_selected, t.potential);
        }
        double max_unselected = -INFINITY;
        for (const auto& t : built.templates)
            if (!chosen.count(t.origin_id)) max_unselected = std::max(max_unselected, t.potential);
        const bool sorted = std::is_sorted(sel.begin(), sel.end(),
                                           [](const Template& a, const Template& b) { return a.potential > b.potential; });
        ok = ok && sel.size() == expected && min_selected >= max_unselected && sorted;
        if (n_percent == kLargeCorpusNPercent) {
            ok = ok && sel.size() <= kLargeCorpusCap;
            d << "N=" << n_percent << "%: " << sel.size() << " of " << built.templates.size() << " (cap "
              << kLargeCorpusCap << "); ";
        }
    }
    // The pipeline's own selection on the toy corpus.
    const auto all = read_jsonl(r.a / "templates.jsonl");
    const auto sel = read_jsonl(r.a / "selected.jsonl");
    std::set<std::string> chosen;
    double min_selected = INFINITY;
    for (const auto& t : sel) {
        chosen.insert(t["origin_id"].get<std::string>());
        min_selected = std::min(min_selected, t["potential"].get<double>());
    }
    double max_unselected = -INFINITY;
    for (const auto& t : all)
        if (!chosen.count(t["origin_id"].get<std::string>()))
            max_unselected = std::max(max_unselected, t["potential"].get<double>());
    const auto expected = static_cast<std::size_t>(
        std::ceil(r.cfg.task.n_percent() * static_cast<double>(all.size()) / 100.0 - 1e-9));
    ok = ok && sel.size() == expected && min_selected >= max_unselected;
    d << "toy run " << sel.size() << " of " << all.size() << " selected (expected " << expected << ")";
    return {ok, d.str()};
}

Outcome fill_validation() {
    const auto& r = graft_runs();
    const auto re = revalidate_grafted(r.a);
    const auto grafted = read_jsonl(r.a / "grafted.jsonl");
    const auto selected = read_jsonl(r.a / "selected.jsonl");
    std::map<std::string, Template> by_origin;
    for (const auto& s : selected) {
        auto t = template_from_json(s, r.cfg.task.mask_token());
        by_origin.emplace(t.origin_id, std::move(t));
    }
    // The mock generator echoes the template; only blank positions may change.
    std::size_t echo_bad = 0;
    for (const auto& g : grafted) {
        const auto& t = by_origin.at(g["origin_id"].get<std::string>());
        const auto pieces = split_spaces(g["text"].get<std::string>());
        if (pieces.size() != t.slots.size()) {
            ++echo_bad;
            continue;
        }
        for (std::size_t i = 0; i < pieces.size(); ++i)
            if (t.slots[i].kept() && pieces[i] != *t.slots[i].surface) {
                ++echo_bad;
                break;
            }
    }
    const auto checked = re["checked"].get<std::size_t>();
    const auto failed = re["failed"].get<std::size_t>();
    std::ostringstream d;
    d << checked << " grafted texts re-validated, " << failed << " failed; " << echo_bad
      << " echo fills changed a kept slot";
    return {checked == grafted.size() && checked > 0 && failed == 0 && echo_bad == 0, d.str()};
}

Outcome shift_invariance() {
    const auto& r = graft_runs();
    const auto corpus = toy_corpus();
    const auto& task = r.cfg.task;
    auto run = [&](double shift) {
        auto opts = r.cfg.scoring_backend->mock_scorer;
        opts.shift = shift;
        MockScoringBackend scorer(opts);
        auto scored = score_corpus(corpus, task, scorer, 0);
        auto templates = build_templates(corpus, scored, task, Masking::potential, 0, 0).templates;
        auto selected = rank_and_select(templates, task.n_percent());
        return std::tuple{std::move(scored), std::move(templates), std::move(selected)};
    };
    const auto [s0, t0, sel0] = run(0.0);
    bool ok = true;
    std::ostringstream d;
    for (double delta : kShifts) {
        const auto [s1, t1, sel1] = run(delta);
        bool same = s0.documents.size() == s1.documents.size() && t0.size() == t1.size() && sel0.size() == sel1.size();
        for (std::size_t i = 0; same && i < s0.documents.size(); ++i)
            for (std::size_t w = 0; w < s0.documents[i].potentials.size(); ++w)
                same = same && s0.documents[i].potentials[w].delta_p == s1.documents[i].potentials[w].delta_p;
        for (std::size_t i = 0; same && i < t0.size(); ++i)
            same = t0[i].potential == t1[i].potential && t0[i].kept_indices() == t1[i].kept_indices();
        for (std::size_t i = 0; same && i < sel0.size(); ++i) same = sel0[i].origin_id == sel1[i].origin_id;
        // The shift did reach the raw logprobs.
        const bool moved = s0.documents[0].potentials[0].logp_class != s1.documents[0].potentials[0].logp_class;
        ok = ok && same && moved;
        d << "delta " << delta << ": " << (same ? "identical" : "CHANGED") << (moved ? "" : " (shift not applied)")
          << "; ";
    }
    d << s0.documents.size() << " docs, " << sel0.size() << " selected";
    return {ok, d.str()};
}

Outcome negative_assembly() {
    const auto& r = graft_runs();
    const auto bundle = read_bundle(r.a / "dataset");
    std::set<std::string> origins;
    for (const auto& t : read_jsonl(r.a / "selected.jsonl")) origins.insert(t["origin_id"].get<std::string>());
    std::size_t pos = 0, raw = 0, synth_neg = 0, overlap = 0;
    for (const auto* side : {&bundle.train, &bundle.validation})
        for (const auto& e : *side) {
            if (e.label == Label::positive) {
                ++pos;
                continue;
            }
            if (e.provenance == Provenance::synthesized) ++synth_neg;
            if (e.provenance == Provenance::raw_negative) ++raw;
            if (e.source_id && origins.count(*e.source_id)) ++overlap;
        }
    const auto need = static_cast<std::size_t>(std::ceil(r.cfg.negative_ratio * static_cast<double>(pos) - 1e-9));

    const auto zdir = fresh_dir("zerogen");
    const auto zcfg = config_in("zerogen", zdir);
    run_pipeline(zcfg);
    const auto zb = read_bundle(zdir / "dataset");
    std::size_t zpos = 0, zneg = 0;
    for (const auto* side : {&zb.train, &zb.validation})
        for (const auto& e : *side) (e.label == Label::positive ? zpos : zneg)++;

    std::ostringstream d;
    d << "graft: " << pos << " positives, " << raw << " raw negatives (expected " << need << "), " << synth_neg
      << " synthesized negatives, " << overlap << " overlapping origins; zerogen: " << zpos << "+" << zneg;
    const bool ok = synth_neg == 0 && raw == need && overlap == 0 && pos > 0 && zpos + zneg == kZeroGenTotal &&
                    zpos == zcfg.synthesis_count && zneg == zcfg.synthesis_count;
    return {ok, d.str()};
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1 determinism", determinism},
        {"AC2 delta-p oracle", delta_oracle},
        {"AC3 template-potential oracle", potential_oracle},
        {"AC4 dcpmi equivalence", dcpmi_equivalence},
        {"AC5 selection invariant", selection_invariant},
        {"AC6 fill validation", fill_validation},
        {"AC7 shift invariance", shift_invariance},
        {"AC8 negative assembly", negative_assembly},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::error_code ec;
    fs::remove_all(scratch_root(), ec);
    return failures == 0 ? 0 : 1;
}
