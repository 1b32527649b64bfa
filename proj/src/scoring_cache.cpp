#include "graftkit/scoring_cache.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "graftkit/hash.hpp"

namespace fs = std::filesystem;

namespace graftkit {

ScoringCache::ScoringCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string ScoringCache::key(const std::string& model, const ScoringRequest& req) {
    std::string material;
    material.reserve(model.size() + req.instruction.size() + req.continuation.size() + 2);
    material += model;
    material += '\x1f';
    material += req.instruction;
    material += '\x1f';
    material += req.continuation;
    return sha256_hex(material);
}

fs::path ScoringCache::path_for(const std::string& key) const { return dir_ / key.substr(0, 2) / (key + ".json"); }

std::optional<std::vector<ScoredToken>> ScoringCache::load(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(in);
        std::vector<ScoredToken> out;
        for (const auto& t : j.at("tokens")) {
            out.push_back(ScoredToken{t.at("surface").get<std::string>(), t.at("logprob").get<double>(),
                                      t.at("start").get<std::size_t>(), t.at("end").get<std::size_t>()});
        }
        return out;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // corrupt entry: treat as a miss and overwrite
    }
}

void ScoringCache::store(const std::string& key, const std::vector<ScoredToken>& tokens) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : tokens)
        arr.push_back({{"surface", t.surface}, {"logprob", t.logprob}, {"start", t.start}, {"end", t.end}});
    const auto target = path_for(key);
    fs::create_directories(target.parent_path());

    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::this_thread::get_id() << "." << tmp_counter_++;
    const auto tmp = target.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << nlohmann::json{{"tokens", arr}}.dump();
    }
    fs::rename(tmp, target);
}

CachedScoringBackend::CachedScoringBackend(std::shared_ptr<ScoringBackend> inner, std::shared_ptr<ScoringCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<ScoredToken> CachedScoringBackend::score(const ScoringRequest& req) {
    const auto k = ScoringCache::key(inner_->model_name(), req);
    if (auto hit = cache_->load(k)) {
        ++hits_;
        return *std::move(hit);
    }
    ++misses_;
    auto tokens = inner_->score(req);
    cache_->store(k, tokens);
    return tokens;
}

}  // namespace graftkit
