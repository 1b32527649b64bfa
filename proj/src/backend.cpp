#include "graftkit/backend.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace graftkit {

void check_tiling(std::span<const ScoredToken> tokens, std::size_t text_size) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.start != pos || t.end <= t.start)
            throw DataError("token " + std::to_string(i) + " [" + std::to_string(t.start) + "," +
                            std::to_string(t.end) + ") breaks tiling at offset " + std::to_string(pos));
        pos = t.end;
    }
    if (pos != text_size)
        throw DataError("tokens cover " + std::to_string(pos) + " of " + std::to_string(text_size) + " bytes");
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    const double scaled = static_cast<double>(base_delay.count()) * std::pow(multiplier, attempt - 1);
    const double capped = std::min(scaled, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<long long>(capped));
}

void sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

TokenBucket::TokenBucket(double rate_per_second, double burst, Clock clock, Sleeper sleeper)
    : rate_(rate_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper(sleep_for)),
      last_(clock_()) {}

void TokenBucket::acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lock(mu_);
    for (;;) {
        const auto now = clock_();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const auto wait = std::chrono::milliseconds(
            static_cast<long long>(std::ceil((1.0 - tokens_) / rate_ * 1000.0)));
        // Waiters queue on the lock.
        sleeper_(wait);
    }
}

}  // namespace graftkit
