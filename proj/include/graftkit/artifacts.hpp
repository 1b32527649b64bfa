#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "graftkit/baselines.hpp"
#include "graftkit/scoring.hpp"
#include "graftkit/synthesis.hpp"
#include "graftkit/templating.hpp"

namespace graftkit {

// JSONL files are written compact, one record per line, keys sorted, through a
// temp file and rename. Identical inputs give byte-identical files.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

// templates.jsonl / selected.jsonl: {origin_id, rendered, kept_indices, potential, k_percent}
nlohmann::json to_json(const Template& t);
/// Rebuilds slots by splitting `rendered` on single spaces; non-kept pieces must equal mask_token.
Template template_from_json(const nlohmann::json& j, const std::string& mask_token);

// grafted.jsonl: {text, label, origin_id, template_potential, attempts, generator_meta, method}
nlohmann::json to_json(const GraftedText& g);
GraftedText grafted_from_json(const nlohmann::json& j);

// mined.jsonl: {doc_id, text, score, method}
nlohmann::json to_json(const MinedText& m);
MinedText mined_from_json(const nlohmann::json& j);

// scores.jsonl: one record per document,
//   {id, delta_p: [...], logp_class: [...], logp_reg: [...]} or {id, skipped: reason}
std::vector<nlohmann::json> scores_to_records(const Corpus& corpus, const ScoredCorpus& scored);
/// Rebuilds a ScoredCorpus against `corpus`; ids must appear in corpus order.
ScoredCorpus scores_from_records(const Corpus& corpus, const std::vector<nlohmann::json>& records);

nlohmann::json to_json(const DroppedItem& d);

}  // namespace graftkit
