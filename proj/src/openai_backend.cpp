#include "graftkit/openai_backend.hpp"

#include <algorithm>

#include <httplib.h>

namespace graftkit {

BaseUrl split_base_url(const std::string& base_url) {
    const auto scheme = base_url.find("://");
    if (scheme == std::string::npos) throw ConfigError("base_url must include a scheme: " + base_url);
    const auto slash = base_url.find('/', scheme + 3);
    BaseUrl out;
    out.origin = base_url.substr(0, slash);
    out.path = slash == std::string::npos ? "" : base_url.substr(slash);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

nlohmann::json completions_request(const std::string& model, const std::string& prompt) {
    return {
        {"model", model},     {"prompt", prompt}, {"max_tokens", 1},
        {"temperature", 0.0}, {"echo", true},     {"logprobs", 1},
    };
}

namespace {

// cp_to_byte[k] = byte offset of code point k; last entry = text size.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
    std::vector<std::size_t> out;
    out.reserve(s.size() + 1);
    for (std::size_t i = 0; i < s.size(); ++i)
        if ((static_cast<unsigned char>(s[i]) & 0xc0) != 0x80) out.push_back(i);
    out.push_back(s.size());
    return out;
}

}  // namespace

std::vector<ScoredToken> parse_completions_logprobs(const nlohmann::json& response, std::string_view prompt,
                                                    std::size_t continuation_offset) {
    if (!response.contains("choices") || !response["choices"].is_array() || response["choices"].empty())
        throw DataError("completions response has no choices");
    const auto& choice = response["choices"][0];
    if (!choice.contains("logprobs") || choice["logprobs"].is_null())
        throw BackendError("server did not return logprobs; echo+logprobs support is required for scoring", false);
    const auto& lp = choice["logprobs"];
    if (!lp.contains("token_logprobs") || !lp.contains("text_offset") || !lp.contains("tokens"))
        throw BackendError("logprobs object lacks tokens/token_logprobs/text_offset", false);

    const auto& offsets = lp["text_offset"];
    const auto& logprobs = lp["token_logprobs"];
    if (offsets.size() != logprobs.size()) throw DataError("text_offset and token_logprobs differ in length");

    const auto cp = code_point_offsets(prompt);
    const std::size_t prompt_cps = cp.size() - 1;
    auto to_byte = [&](std::size_t code_point) {
        if (code_point > prompt_cps) throw DataError("text_offset beyond prompt");
        return cp[code_point];
    };

    std::vector<std::size_t> starts;
    for (const auto& o : offsets) {
        const auto v = o.get<long long>();
        if (v < 0) throw DataError("negative text_offset");
        if (static_cast<std::size_t>(v) >= prompt_cps) break;  // generated tokens
        starts.push_back(static_cast<std::size_t>(v));
    }

    std::vector<ScoredToken> out;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const std::size_t b = to_byte(starts[i]);
        const std::size_t e = i + 1 < starts.size() ? to_byte(starts[i + 1]) : prompt.size();
        if (e < b) throw DataError("text_offset values are not increasing");
        if (e <= continuation_offset || e == b) continue;
        if (logprobs[i].is_null())
            throw DataError("missing logprob for continuation token " + std::to_string(i));
        ScoredToken t;
        t.start = std::max(b, continuation_offset) - continuation_offset;
        t.end = e - continuation_offset;
        t.surface = std::string(prompt.substr(t.start + continuation_offset, t.end - t.start));
        t.logprob = logprobs[i].get<double>();
        out.push_back(std::move(t));
    }
    return out;
}

nlohmann::json chat_request(const std::string& model, const GenerationRequest& req) {
    nlohmann::json body = {
        {"model", model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.instruction}}})},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };
    if (req.seed) body["seed"] = *req.seed;
    return body;
}

std::string parse_chat_response(const nlohmann::json& response) {
    if (!response.contains("choices") || !response["choices"].is_array() || response["choices"].empty())
        throw DataError("chat response has no choices");
    const auto& msg = response["choices"][0].value("message", nlohmann::json::object());
    const auto content = msg.find("content");
    if (content == msg.end() || content->is_null()) return {};
    return content->get<std::string>();
}

class HttpTransport {
public:
    explicit HttpTransport(HttpBackendConfig cfg)
        : cfg_(std::move(cfg)),
          url_(split_base_url(cfg_.base_url)),
          bucket_(cfg_.requests_per_second, 1.0),
          slots_(std::max(1, cfg_.parallelism)) {}

    const HttpBackendConfig& config() const { return cfg_; }

    /// One POST attempt. Retryable failures throw retryable BackendErrors.
    nlohmann::json post(const std::string& endpoint, const nlohmann::json& body) {
        struct Slot {
            std::counting_semaphore<>& s;
            explicit Slot(std::counting_semaphore<>& sem) : s(sem) { s.acquire(); }
            ~Slot() { s.release(); }
        } slot(slots_);
        bucket_.acquire();

        httplib::Client cli(url_.origin);
        cli.set_connection_timeout(cfg_.timeout_seconds, 0);
        cli.set_read_timeout(cfg_.timeout_seconds, 0);
        cli.set_write_timeout(cfg_.timeout_seconds, 0);
        if (!cfg_.api_key.empty()) cli.set_bearer_token_auth(cfg_.api_key);

        auto res = cli.Post(url_.path + endpoint, body.dump(), "application/json");
        if (!res) throw BackendError("transport error: " + httplib::to_string(res.error()), true);
        const int status = res->status;
        if (status == 408 || status == 429 || status >= 500)
            throw BackendError("HTTP " + std::to_string(status) + " from " + endpoint, true);
        if (status != 200)
            throw BackendError("HTTP " + std::to_string(status) + " from " + endpoint + ": " +
                                   res->body.substr(0, 300),
                               false);
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error&) {
            throw BackendError("unparseable JSON body from " + endpoint, true);
        }
    }

private:
    HttpBackendConfig cfg_;
    BaseUrl url_;
    TokenBucket bucket_;
    std::counting_semaphore<> slots_;
};

OpenAIScoringBackend::OpenAIScoringBackend(HttpBackendConfig cfg)
    : model_(cfg.model), transport_(std::make_unique<HttpTransport>(std::move(cfg))) {}

OpenAIScoringBackend::~OpenAIScoringBackend() = default;

int OpenAIScoringBackend::parallelism() const { return std::max(1, transport_->config().parallelism); }

std::vector<ScoredToken> OpenAIScoringBackend::score(const ScoringRequest& req) {
    if (req.continuation.empty()) throw std::invalid_argument("scoring request has an empty continuation");
    const std::string prompt = req.instruction + std::string(kScoringSeparator) + req.continuation;
    const std::size_t offset = prompt.size() - req.continuation.size();
    const auto body = completions_request(model_, prompt);
    auto tokens = retry_call(transport_->config().retry, "score", [&] {
        return parse_completions_logprobs(transport_->post("/completions", body), prompt, offset);
    });
    check_tiling(tokens, req.continuation.size());
    return tokens;
}

OpenAIChatBackend::OpenAIChatBackend(HttpBackendConfig cfg)
    : model_(cfg.model), transport_(std::make_unique<HttpTransport>(std::move(cfg))) {}

OpenAIChatBackend::~OpenAIChatBackend() = default;

int OpenAIChatBackend::parallelism() const { return std::max(1, transport_->config().parallelism); }

namespace {

class EmptyAttempt : public BackendError {
public:
    EmptyAttempt() : BackendError("empty completion", true) {}
};

}  // namespace

std::string OpenAIChatBackend::generate(const GenerationRequest& req) {
    if (req.max_tokens < 1) throw std::invalid_argument("max_tokens must be ≥ 1");
    const auto body = chat_request(model_, req);
    try {
        return retry_call(transport_->config().retry, "generate", [&] {
            auto text = parse_chat_response(transport_->post("/chat/completions", body));
            if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw EmptyAttempt();
            return text;
        });
    } catch (const EmptyAttempt&) {
        throw EmptyCompletionError("generation backend returned only empty completions");
    }
}

}  // namespace graftkit
