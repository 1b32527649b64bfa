#pragma once

#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graftkit/backend.hpp"

namespace graftkit {

/// Connection settings for an OpenAI-compatible inference server.
struct HttpBackendConfig {
    /// e.g. "http://localhost:8000/v1"; endpoint paths are appended to it.
    std::string base_url;
    std::string model;
    std::string api_key;
    double requests_per_second = 0.0;  // 0 = unlimited
    int parallelism = 4;
    int timeout_seconds = 120;
    RetryPolicy retry;
};

struct BaseUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // prefix without trailing slash
};

BaseUrl split_base_url(const std::string& base_url);

/// Separator between the instruction and the teacher-forced text in the echoed prompt.
inline constexpr std::string_view kScoringSeparator = "\n";

/// Wire shape for /completions with echo=true and logprobs.
nlohmann::json completions_request(const std::string& model, const std::string& prompt);

/// Pull the continuation's tokens out of an echoed completions response.
/// `prompt` is the exact prompt sent; the continuation starts at byte
/// `continuation_offset`. Server text_offset values count code points; they
/// are mapped back to bytes here. A token straddling the boundary is clipped
/// to the continuation and keeps its full logprob.
std::vector<ScoredToken> parse_completions_logprobs(const nlohmann::json& response, std::string_view prompt,
                                                    std::size_t continuation_offset);

/// Wire shape for /chat/completions.
nlohmann::json chat_request(const std::string& model, const GenerationRequest& req);
std::string parse_chat_response(const nlohmann::json& response);

class HttpTransport;

class OpenAIScoringBackend final : public ScoringBackend {
public:
    explicit OpenAIScoringBackend(HttpBackendConfig cfg);
    ~OpenAIScoringBackend() override;
    std::vector<ScoredToken> score(const ScoringRequest& req) override;
    std::string model_name() const override { return model_; }
    int parallelism() const override;

private:
    std::string model_;
    std::unique_ptr<HttpTransport> transport_;
};

class OpenAIChatBackend final : public GenerationBackend {
public:
    explicit OpenAIChatBackend(HttpBackendConfig cfg);
    ~OpenAIChatBackend() override;
    std::string generate(const GenerationRequest& req) override;
    std::string model_name() const override { return model_; }
    int parallelism() const override;

private:
    std::string model_;
    std::unique_ptr<HttpTransport> transport_;
};

}  // namespace graftkit
