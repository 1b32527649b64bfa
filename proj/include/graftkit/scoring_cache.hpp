#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graftkit/backend.hpp"

namespace graftkit {

/// Content-addressed store of scoring responses.
/// Key: sha256(model ++ 0x1f ++ instruction ++ 0x1f ++ text). Value:
/// `<dir>/<key[0:2]>/<key>.json` holding the token list. Writes go through a
/// temporary file and a rename, so concurrent writers of one key are harmless.
class ScoringCache {
public:
    explicit ScoringCache(std::filesystem::path dir);

    static std::string key(const std::string& model, const ScoringRequest& req);

    std::optional<std::vector<ScoredToken>> load(const std::string& key) const;
    void store(const std::string& key, const std::vector<ScoredToken>& tokens);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path dir_;
    std::atomic<unsigned long long> tmp_counter_{0};
};

/// Decorator that consults a ScoringCache before the wrapped backend.
class CachedScoringBackend final : public ScoringBackend {
public:
    CachedScoringBackend(std::shared_ptr<ScoringBackend> inner, std::shared_ptr<ScoringCache> cache);

    std::vector<ScoredToken> score(const ScoringRequest& req) override;
    std::string model_name() const override { return inner_->model_name(); }
    int parallelism() const override { return inner_->parallelism(); }

    unsigned long long hits() const { return hits_; }
    unsigned long long misses() const { return misses_; }

private:
    std::shared_ptr<ScoringBackend> inner_;
    std::shared_ptr<ScoringCache> cache_;
    std::atomic<unsigned long long> hits_{0};
    std::atomic<unsigned long long> misses_{0};
};

}  // namespace graftkit
