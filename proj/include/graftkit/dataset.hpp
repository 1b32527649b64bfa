#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graftkit/baselines.hpp"
#include "graftkit/corpus.hpp"
#include "graftkit/synthesis.hpp"

namespace graftkit {

enum class Label { positive, negative };
enum class Provenance { grafted, mined, synthesized, raw_negative };
enum class NegativeStrategy { raw_sample, synthesized };

std::string_view to_string(Label l);
std::string_view to_string(Provenance p);
std::string_view to_string(NegativeStrategy s);
Label parse_label(std::string_view s);
Provenance parse_provenance(std::string_view s);
NegativeStrategy parse_negative_strategy(std::string_view s);

struct LabeledExample {
    std::string text;
    Label label = Label::positive;
    Provenance provenance = Provenance::grafted;
    std::optional<std::string> source_id;

    bool operator==(const LabeledExample&) const = default;
};

std::vector<LabeledExample> positives_from(std::span<const GraftedText> texts, Provenance provenance);
std::vector<LabeledExample> positives_from(std::span<const MinedText> mined);
std::vector<LabeledExample> negatives_from(std::span<const GraftedText> out_of_class);

/// Throws DataError if any text carries both labels.
void check_label_collisions(std::span<const LabeledExample> examples);

/// positives followed by ceil(ratio * |positives|) negatives. raw_sample draws
/// corpus documents (seeded, without replacement) whose ids are not positive
/// sources; synthesized takes the first negatives from `synthesized_negatives`.
std::vector<LabeledExample> assemble(std::span<const LabeledExample> positives, const Corpus& corpus,
                                     NegativeStrategy strategy, double ratio, std::uint64_t seed,
                                     std::span<const LabeledExample> synthesized_negatives = {});

struct BundleManifest {
    std::string config_hash;
    nlohmann::json seeds = nlohmann::json::object();
    double validation_fraction = 0.0;
    std::size_t train_count = 0;
    std::size_t validation_count = 0;
    std::map<std::string, std::size_t> provenance_counts;
    std::map<std::string, std::size_t> label_counts;
    nlohmann::json extra = nlohmann::json::object();  // negative strategy, per-stage counts, ...

    nlohmann::json to_json() const;
};

struct DatasetBundle {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> validation;
    BundleManifest manifest;
};

/// Stratified split: per label, round(fraction * n) examples (at least one,
/// at most n - 1) go to validation. Identical texts always land on the same
/// side. Members keep their input order.
DatasetBundle split(std::span<const LabeledExample> examples, double validation_fraction, std::uint64_t seed);

nlohmann::json to_json(const LabeledExample& e);
LabeledExample labeled_example_from_json(const nlohmann::json& j);

/// Writes train.jsonl, validation.jsonl and manifest.json into `dir`.
void write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle read_bundle(const std::filesystem::path& dir);

}  // namespace graftkit
