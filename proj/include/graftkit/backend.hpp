#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "graftkit/error.hpp"

namespace graftkit {

struct ScoringRequest {
    std::string instruction;
    /// The raw text, teacher-forced after the instruction.
    std::string continuation;
};

/// One model token of the continuation; offsets are bytes into the continuation.
struct ScoredToken {
    std::string surface;
    double logprob = 0.0;
    std::size_t start = 0;
    std::size_t end = 0;
};

struct GenerationRequest {
    std::string instruction;
    int max_tokens = 256;
    double temperature = 1.0;
    std::optional<std::uint64_t> seed;
};

/// Teacher-forced logprob scoring. Implementations must be safe to call
/// from several threads at once.
class ScoringBackend {
public:
    virtual ~ScoringBackend() = default;
    virtual std::vector<ScoredToken> score(const ScoringRequest& req) = 0;
    virtual std::string model_name() const = 0;
    /// Maximum useful number of concurrent in-flight requests.
    virtual int parallelism() const { return 1; }
};

/// Free-form chat generation. Same thread-safety contract as ScoringBackend.
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::string generate(const GenerationRequest& req) = 0;
    virtual std::string model_name() const = 0;
    virtual int parallelism() const { return 1; }
};

/// Throws DataError unless the tokens cover [0, text_size) contiguously in order.
void check_tiling(std::span<const ScoredToken> tokens, std::size_t text_size);

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{8000};
    double multiplier = 2.0;

    /// Delay before retry number `attempt` (1-based attempt that just failed).
    std::chrono::milliseconds delay_after(int attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

void sleep_for(std::chrono::milliseconds d);

/// Run `fn` until it succeeds, retrying only retryable BackendErrors with
/// exponential backoff. Never makes more than policy.max_attempts calls.
template <typename Fn>
auto retry_call(const RetryPolicy& policy, const char* what, Fn&& fn, const Sleeper& sleeper = sleep_for)
    -> decltype(fn()) {
    const int cap = policy.max_attempts < 1 ? 1 : policy.max_attempts;
    for (int attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (const BackendError& e) {
            if (!e.retryable() || attempt >= cap) throw;
            const auto delay = policy.delay_after(attempt);
            spdlog::warn("{}: attempt {}/{} failed ({}); retrying in {} ms", what, attempt, cap, e.what(),
                         delay.count());
            sleeper(delay);
        }
    }
}

/// Token-bucket rate limiter. rate <= 0 disables limiting.
class TokenBucket {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    TokenBucket(double rate_per_second, double burst, Clock clock = nullptr, Sleeper sleeper = nullptr);

    /// Blocks until one token is available and consumes it.
    void acquire();

private:
    double rate_;
    double burst_;
    double tokens_;
    Clock clock_;
    Sleeper sleeper_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mu_;
};

}  // namespace graftkit
