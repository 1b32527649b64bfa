#include "graftkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "graftkit/artifacts.hpp"
#include "graftkit/hash.hpp"
#include "graftkit/rng.hpp"

namespace graftkit {

std::string_view to_string(Label l) { return l == Label::positive ? "positive" : "negative"; }

std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::grafted: return "grafted";
    case Provenance::mined: return "mined";
    case Provenance::synthesized: return "synthesized";
    case Provenance::raw_negative: return "raw-negative";
    }
    return "unknown";
}

std::string_view to_string(NegativeStrategy s) {
    return s == NegativeStrategy::raw_sample ? "raw-sample" : "synthesized";
}

Label parse_label(std::string_view s) {
    if (s == "positive") return Label::positive;
    if (s == "negative") return Label::negative;
    throw DataError("unknown label '" + std::string(s) + "'");
}

Provenance parse_provenance(std::string_view s) {
    if (s == "grafted") return Provenance::grafted;
    if (s == "mined") return Provenance::mined;
    if (s == "synthesized") return Provenance::synthesized;
    if (s == "raw-negative") return Provenance::raw_negative;
    throw DataError("unknown provenance '" + std::string(s) + "'");
}

NegativeStrategy parse_negative_strategy(std::string_view s) {
    if (s == "raw-sample") return NegativeStrategy::raw_sample;
    if (s == "synthesized") return NegativeStrategy::synthesized;
    throw ConfigError("unknown negative strategy '" + std::string(s) + "' (expected raw-sample or synthesized)");
}

std::vector<LabeledExample> positives_from(std::span<const GraftedText> texts, Provenance provenance) {
    std::vector<LabeledExample> out;
    for (const auto& g : texts) out.push_back({g.text, Label::positive, provenance, g.origin_id});
    return out;
}

std::vector<LabeledExample> positives_from(std::span<const MinedText> mined) {
    std::vector<LabeledExample> out;
    for (const auto& m : mined) out.push_back({m.text, Label::positive, Provenance::mined, m.doc_id});
    return out;
}

std::vector<LabeledExample> negatives_from(std::span<const GraftedText> out_of_class) {
    std::vector<LabeledExample> out;
    for (const auto& g : out_of_class) out.push_back({g.text, Label::negative, Provenance::synthesized, g.origin_id});
    return out;
}

void check_label_collisions(std::span<const LabeledExample> examples) {
    std::unordered_map<std::string_view, Label> seen;
    for (const auto& e : examples) {
        auto [it, inserted] = seen.emplace(e.text, e.label);
        if (!inserted && it->second != e.label)
            throw DataError("text appears as both positive and negative: \"" + e.text.substr(0, 80) + "\"");
    }
}

std::vector<LabeledExample> assemble(std::span<const LabeledExample> positives, const Corpus& corpus,
                                     NegativeStrategy strategy, double ratio, std::uint64_t seed,
                                     std::span<const LabeledExample> synthesized_negatives) {
    if (positives.empty()) throw DataError("no positive examples to assemble");
    if (!(ratio > 0.0)) throw std::invalid_argument("negative ratio must be > 0");
    const auto need = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(positives.size()) - 1e-9));

    std::vector<LabeledExample> out(positives.begin(), positives.end());
    for (const auto& p : out)
        if (p.text.empty() || p.label != Label::positive) throw DataError("positives must be non-empty positive examples");

    if (strategy == NegativeStrategy::raw_sample) {
        std::unordered_set<std::string_view> origins, texts;
        for (const auto& p : positives) {
            if (p.source_id) origins.insert(*p.source_id);
            texts.insert(p.text);
        }
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto& d = corpus.documents[i];
            if (d.words.empty() || origins.count(d.id) || texts.count(d.text)) continue;
            pool.push_back(i);
        }
        if (pool.size() < need)
            throw DataError("corpus has " + std::to_string(pool.size()) + " eligible negatives but " +
                            std::to_string(need) + " were requested (shortfall " +
                            std::to_string(need - pool.size()) + ")");
        Rng rng(derive_seed(seed, "raw-negatives"));
        for (std::size_t k : rng.sample_sorted(pool.size(), need)) {
            const auto& d = corpus.documents[pool[k]];
            out.push_back({d.text, Label::negative, Provenance::raw_negative, d.id});
        }
    } else {
        if (synthesized_negatives.size() < need)
            throw DataError("only " + std::to_string(synthesized_negatives.size()) +
                            " synthesized negatives for " + std::to_string(need) + " requested (shortfall " +
                            std::to_string(need - synthesized_negatives.size()) + ")");
        for (std::size_t i = 0; i < need; ++i) {
            auto n = synthesized_negatives[i];
            n.label = Label::negative;
            n.provenance = Provenance::synthesized;
            out.push_back(std::move(n));
        }
    }
    check_label_collisions(out);
    return out;
}

nlohmann::json BundleManifest::to_json() const {
    nlohmann::json j = extra;
    j["config_hash"] = config_hash;
    j["seeds"] = seeds;
    j["validation_fraction"] = validation_fraction;
    j["counts"] = {{"train", train_count},
                   {"validation", validation_count},
                   {"by_provenance", provenance_counts},
                   {"by_label", label_counts}};
    return j;
}

DatasetBundle split(std::span<const LabeledExample> examples, double validation_fraction, std::uint64_t seed) {
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("validation_fraction must be in (0,1)");
    check_label_collisions(examples);

    std::vector<bool> to_validation(examples.size(), false);
    for (Label label : {Label::positive, Label::negative}) {
        // Groups of identical texts, in first-appearance order.
        std::vector<std::vector<std::size_t>> groups;
        std::unordered_map<std::string_view, std::size_t> group_of;
        std::size_t n = 0;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (examples[i].label != label) continue;
            ++n;
            auto [it, inserted] = group_of.emplace(examples[i].text, groups.size());
            if (inserted) groups.emplace_back();
            groups[it->second].push_back(i);
        }
        if (n == 0) continue;
        if (n < 2)
            throw DataError("label " + std::string(to_string(label)) + " has fewer than 2 examples; cannot split");
        auto target = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
        target = std::clamp<std::size_t>(target, 1, n - 1);

        std::vector<std::size_t> order(groups.size());
        for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
        Rng rng(derive_seed(seed, to_string(label)));
        rng.shuffle(order);
        std::size_t taken = 0;
        for (std::size_t g : order) {
            if (taken >= target) break;
            for (std::size_t i : groups[g]) to_validation[i] = true;
            taken += groups[g].size();
        }
    }

    DatasetBundle bundle;
    for (std::size_t i = 0; i < examples.size(); ++i)
        (to_validation[i] ? bundle.validation : bundle.train).push_back(examples[i]);

    auto& m = bundle.manifest;
    m.validation_fraction = validation_fraction;
    m.seeds["split"] = seed;
    m.train_count = bundle.train.size();
    m.validation_count = bundle.validation.size();
    for (const auto& e : examples) {
        ++m.provenance_counts[std::string(to_string(e.provenance))];
        ++m.label_counts[std::string(to_string(e.label))];
    }
    return bundle;
}

nlohmann::json to_json(const LabeledExample& e) {
    return {{"text", e.text},
            {"label", to_string(e.label)},
            {"provenance", to_string(e.provenance)},
            {"source_id", e.source_id ? nlohmann::json(*e.source_id) : nlohmann::json(nullptr)}};
}

LabeledExample labeled_example_from_json(const nlohmann::json& j) {
    try {
        LabeledExample e;
        e.text = j.at("text").get<std::string>();
        e.label = parse_label(j.at("label").get<std::string>());
        e.provenance = parse_provenance(j.at("provenance").get<std::string>());
        if (j.contains("source_id") && !j["source_id"].is_null()) e.source_id = j["source_id"].get<std::string>();
        if (e.text.empty()) throw DataError("labeled example with empty text");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed labeled example: ") + ex.what());
    }
}

void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir) {
    std::vector<nlohmann::json> train, validation;
    for (const auto& e : bundle.train) train.push_back(to_json(e));
    for (const auto& e : bundle.validation) validation.push_back(to_json(e));
    write_jsonl(dir / "train.jsonl", train);
    write_jsonl(dir / "validation.jsonl", validation);
    write_json(dir / "manifest.json", bundle.manifest.to_json());
}

DatasetBundle read_bundle(const std::filesystem::path& dir) {
    DatasetBundle b;
    for (const auto& j : read_jsonl(dir / "train.jsonl")) b.train.push_back(labeled_example_from_json(j));
    for (const auto& j : read_jsonl(dir / "validation.jsonl")) b.validation.push_back(labeled_example_from_json(j));
    const auto m = read_json(dir / "manifest.json");
    b.manifest.config_hash = m.value("config_hash", std::string());
    b.manifest.seeds = m.value("seeds", nlohmann::json::object());
    b.manifest.validation_fraction = m.value("validation_fraction", 0.0);
    if (m.contains("counts")) {
        const auto& c = m["counts"];
        b.manifest.train_count = c.value("train", std::size_t{0});
        b.manifest.validation_count = c.value("validation", std::size_t{0});
        b.manifest.provenance_counts = c.value("by_provenance", std::map<std::string, std::size_t>{});
        b.manifest.label_counts = c.value("by_label", std::map<std::string, std::size_t>{});
    }
    for (const auto& [k, v] : m.items())
        if (k != "config_hash" && k != "seeds" && k != "validation_fraction" && k != "counts") b.manifest.extra[k] = v;
    return b;
}

}  // namespace graftkit
