#include "graftkit/artifacts.hpp"

#include <fstream>
#include <unordered_map>

#include "graftkit/error.hpp"

namespace fs = std::filesystem;

namespace graftkit {

namespace {

void write_atomically(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace

void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& records) {
    std::string content;
    for (const auto& r : records) {
        content += r.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        content += '\n';
    }
    write_atomically(path, content);
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(path.filename().string() + " line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& value) {
    write_atomically(path, value.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

nlohmann::json to_json(const Template& t) {
    return {{"origin_id", t.origin_id},
            {"rendered", t.render()},
            {"kept_indices", t.kept_indices()},
            {"potential", t.potential},
            {"k_percent", t.k_percent}};
}

Template template_from_json(const nlohmann::json& j, const std::string& mask_token) {
    try {
        Template t;
        t.origin_id = j.at("origin_id").get<std::string>();
        t.potential = j.at("potential").get<double>();
        t.k_percent = j.at("k_percent").get<double>();
        t.mask_token = mask_token;
        const auto kept = j.at("kept_indices").get<std::vector<std::size_t>>();
        const auto rendered = j.at("rendered").get<std::string>();

        std::size_t pos = 0, k = 0, index = 0;
        while (pos <= rendered.size()) {
            std::size_t next = rendered.find(' ', pos);
            if (next == std::string::npos) next = rendered.size();
            std::string piece = rendered.substr(pos, next - pos);
            Slot s{index, std::nullopt};
            if (k < kept.size() && kept[k] == index) {
                s.surface = std::move(piece);
                ++k;
                ++t.kept_count;
            } else if (piece != mask_token) {
                throw DataError("template " + t.origin_id + ": slot " + std::to_string(index) +
                                " is neither kept nor a mask");
            }
            t.slots.push_back(std::move(s));
            ++index;
            pos = next + 1;
        }
        if (k != kept.size()) throw DataError("template " + t.origin_id + ": kept_indices out of range");
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed template record: ") + e.what());
    }
}

nlohmann::json to_json(const GraftedText& g) {
    nlohmann::json meta = {{"model", g.generator_meta.model}, {"temperature", g.generator_meta.temperature}};
    meta["seed"] = g.generator_meta.seed ? nlohmann::json(*g.generator_meta.seed) : nlohmann::json(nullptr);
    return {{"text", g.text},
            {"label", g.label},
            {"origin_id", g.origin_id ? nlohmann::json(*g.origin_id) : nlohmann::json(nullptr)},
            {"template_potential",
             g.template_potential ? nlohmann::json(*g.template_potential) : nlohmann::json(nullptr)},
            {"attempts", g.attempts},
            {"generator_meta", meta},
            {"method", g.method}};
}

GraftedText grafted_from_json(const nlohmann::json& j) {
    try {
        GraftedText g;
        g.text = j.at("text").get<std::string>();
        g.label = j.at("label").get<std::string>();
        if (!j.at("origin_id").is_null()) g.origin_id = j["origin_id"].get<std::string>();
        if (!j.at("template_potential").is_null()) g.template_potential = j["template_potential"].get<double>();
        g.attempts = j.at("attempts").get<int>();
        const auto& meta = j.at("generator_meta");
        g.generator_meta.model = meta.at("model").get<std::string>();
        g.generator_meta.temperature = meta.at("temperature").get<double>();
        if (!meta.at("seed").is_null()) g.generator_meta.seed = meta["seed"].get<std::uint64_t>();
        g.method = j.value("method", std::string("graft"));
        if (g.text.empty()) throw DataError("grafted record with empty text");
        if (g.attempts < 1) throw DataError("grafted record with attempts < 1");
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed grafted record: ") + e.what());
    }
}

nlohmann::json to_json(const MinedText& m) {
    return {{"doc_id", m.doc_id}, {"text", m.text}, {"score", m.score}, {"method", to_string(m.method)}};
}

MinedText mined_from_json(const nlohmann::json& j) {
    try {
        return {j.at("doc_id").get<std::string>(), j.at("text").get<std::string>(), j.at("score").get<double>(),
                parse_mining_method(j.at("method").get<std::string>())};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed mined record: ") + e.what());
    }
}

std::vector<nlohmann::json> scores_to_records(const Corpus& corpus, const ScoredCorpus& scored) {
    std::unordered_map<std::string, const DocumentScores*> by_id;
    for (const auto& d : scored.documents) by_id.emplace(d.doc_id, &d);
    std::unordered_map<std::string, const SkippedDocument*> skipped;
    for (const auto& s : scored.skipped) skipped.emplace(s.id, &s);

    std::vector<nlohmann::json> out;
    for (const auto& doc : corpus.documents) {
        if (auto it = by_id.find(doc.id); it != by_id.end()) {
            nlohmann::json dp = nlohmann::json::array(), lc = nlohmann::json::array(), lr = nlohmann::json::array();
            for (const auto& p : it->second->potentials) {
                dp.push_back(p.delta_p);
                lc.push_back(p.logp_class);
                lr.push_back(p.logp_reg);
            }
            out.push_back({{"id", doc.id}, {"delta_p", dp}, {"logp_class", lc}, {"logp_reg", lr}});
        } else if (auto sk = skipped.find(doc.id); sk != skipped.end()) {
            out.push_back({{"id", doc.id}, {"skipped", sk->second->reason}});
        }
    }
    return out;
}

ScoredCorpus scores_from_records(const Corpus& corpus, const std::vector<nlohmann::json>& records) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < corpus.size(); ++i) index.emplace(corpus.documents[i].id, i);

    ScoredCorpus out;
    try {
        for (const auto& r : records) {
            const auto id = r.at("id").get<std::string>();
            const auto it = index.find(id);
            if (it == index.end()) throw DataError("scores record for unknown document " + id);
            if (r.contains("skipped")) {
                out.skipped.push_back({id, r["skipped"].get<std::string>()});
                continue;
            }
            const auto dp = r.at("delta_p").get<std::vector<double>>();
            const auto lc = r.at("logp_class").get<std::vector<double>>();
            const auto lr = r.at("logp_reg").get<std::vector<double>>();
            if (dp.size() != lc.size() || dp.size() != lr.size())
                throw DataError("scores record for " + id + " has ragged arrays");
            DocumentScores ds{it->second, id, {}};
            for (std::size_t i = 0; i < dp.size(); ++i) ds.potentials.push_back({i, dp[i], lc[i], lr[i]});
            out.documents.push_back(std::move(ds));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed scores record: ") + e.what());
    }
    return out;
}

nlohmann::json to_json(const DroppedItem& d) {
    return {{"id", d.id}, {"reason", d.reason}, {"attempts", d.attempts}};
}

}  // namespace graftkit
