#include "graftkit/mock_backend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <omp.h>

#include "graftkit/corpus.hpp"
#include "graftkit/hash.hpp"

namespace graftkit {

namespace {

constexpr std::size_t kMaxPieceBytes = 4;

double quantize(double v) { return std::round(v / kMockLogprobQuantum) * kMockLogprobQuantum; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

int resolve_parallelism(int p) { return p > 0 ? p : omp_get_max_threads(); }

bool utf8_continuation(unsigned char c) { return (c & 0xc0) == 0x80; }

// Bare word around byte `pos`: whitespace chunk with punctuation edges trimmed, lowercased.
std::string enclosing_word(std::string_view text, std::size_t pos) {
    std::size_t b = pos, e = pos;
    while (b > 0 && !is_space(static_cast<unsigned char>(text[b - 1]))) --b;
    while (e < text.size() && !is_space(static_cast<unsigned char>(text[e]))) ++e;
    while (b < e && is_punct(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && is_punct(static_cast<unsigned char>(text[e - 1]))) --e;
    return lower(text.substr(b, e - b));
}

constexpr std::array<const char*, 48> kVocabulary = {
    "wow",     "really",  "never",   "expected", "this",    "today",  "amazing", "suddenly",
    "just",    "found",   "out",     "my",       "friend",  "the",    "news",    "totally",
    "shocked", "can't",   "believe", "it",       "what",    "a",      "day",     "so",
    "happy",   "again",   "finally", "everyone", "knows",   "when",   "luck",    "feel",
    "strange", "morning", "night",   "home",     "work",    "game",   "team",    "city",
    "love",    "people",  "little",  "big",      "moment",  "right",  "now",     "here",
};

std::string vocab_word(std::uint64_t h) { return kVocabulary[h % kVocabulary.size()]; }

}  // namespace

double mock_logprob(std::string_view token, std::string_view instruction, std::uint64_t seed) {
    std::uint64_t h = fnv1a64_u64(seed);
    h = fnv1a64(instruction, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
    h = fnv1a64(token, h);
    h = mix64(h);
    const auto q = static_cast<double>(h >> 44);  // 20 bits
    return -10.0 * q * kMockLogprobQuantum;
}

std::vector<std::pair<std::size_t, std::size_t>> mock_token_spans(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const std::size_t start = i;
        while (i < n && is_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i == n) {
            spans.emplace_back(start, n);
            break;
        }
        if (is_punct(static_cast<unsigned char>(text[i]))) {
            ++i;
        } else {
            std::size_t taken = 0;
            while (i < n && taken < kMaxPieceBytes) {
                const auto c = static_cast<unsigned char>(text[i]);
                if (is_space(c) || is_punct(c)) break;
                ++i;
                ++taken;
                while (i < n && utf8_continuation(static_cast<unsigned char>(text[i]))) {
                    ++i;
                    ++taken;
                }
            }
        }
        spans.emplace_back(start, i);
    }
    return spans;
}

MockScoringBackend::MockScoringBackend(MockScorerOptions opts) : opts_(std::move(opts)) {
    opts_.shift = quantize(opts_.shift);
    for (auto& a : opts_.affinities) {
        a.bonus = quantize(a.bonus);
        a.cue = lower(a.cue);
        for (auto& w : a.words) w = lower(w);
    }
}

std::vector<ScoredToken> MockScoringBackend::score(const ScoringRequest& req) {
    if (req.continuation.empty()) throw std::invalid_argument("scoring request has an empty continuation");

    const std::string instr_lower = lower(req.instruction);
    std::vector<const MockAffinity*> active;
    for (const auto& a : opts_.affinities)
        if (!a.cue.empty() && instr_lower.find(a.cue) != std::string::npos) active.push_back(&a);

    std::vector<ScoredToken> out;
    const std::string_view text = req.continuation;
    for (auto [b, e] : mock_token_spans(text)) {
        ScoredToken t;
        t.surface = std::string(text.substr(b, e - b));
        t.start = b;
        t.end = e;
        t.logprob = mock_logprob(t.surface, req.instruction, opts_.seed) + opts_.shift;
        if (!active.empty()) {
            std::size_t core = b;
            while (core < e && is_space(static_cast<unsigned char>(text[core]))) ++core;
            if (core < e) {
                const std::string word = enclosing_word(text, core);
                for (const auto* a : active)
                    if (std::find(a->words.begin(), a->words.end(), word) != a->words.end()) t.logprob += a->bonus;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::string MockScoringBackend::model_name() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& a : opts_.affinities) {
        h = fnv1a64(a.cue, h);
        for (const auto& w : a.words) h = fnv1a64(w, fnv1a64("\x1f", h));
        h = fnv1a64_u64(static_cast<std::uint64_t>(std::llround(a.bonus / kMockLogprobQuantum)), h);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "mock-scorer:seed=%llu:shift=%.17g:aff=%016llx",
                  static_cast<unsigned long long>(opts_.seed), opts_.shift, static_cast<unsigned long long>(h));
    return buf;
}

int MockScoringBackend::parallelism() const { return resolve_parallelism(opts_.parallelism); }

MockGenerationBackend::MockGenerationBackend(MockGeneratorOptions opts) : opts_(std::move(opts)) {}

std::string MockGenerationBackend::generate(const GenerationRequest& req) {
    if (req.max_tokens < 1) throw std::invalid_argument("max_tokens must be ≥ 1");
    if (opts_.constant) return *opts_.constant;

    std::uint64_t h = fnv1a64_u64(opts_.seed);
    h = fnv1a64_u64(req.seed ? *req.seed + 1 : 0, h);
    h = mix64(fnv1a64(req.instruction, h));

    static constexpr std::string_view kTemplateTag = "Template: ";
    const std::string_view prompt = req.instruction;
    std::size_t tag = prompt.starts_with(kTemplateTag) ? 0 : prompt.find(std::string("\n") + std::string(kTemplateTag));
    if (tag != std::string_view::npos) {
        if (tag != 0) ++tag;
        std::string_view rendered = prompt.substr(tag + kTemplateTag.size());
        if (auto nl = rendered.find('\n'); nl != std::string_view::npos) rendered = rendered.substr(0, nl);

        std::string out;
        std::size_t blank_index = 0;
        std::size_t pos = 0;
        while (pos <= rendered.size()) {
            std::size_t next = rendered.find(' ', pos);
            if (next == std::string_view::npos) next = rendered.size();
            const std::string_view piece = rendered.substr(pos, next - pos);
            if (!piece.empty()) {
                if (!out.empty()) out.push_back(' ');
                if (piece == opts_.mask_token)
                    out += opts_.fill_word ? *opts_.fill_word : vocab_word(mix64(h + ++blank_index));
                else
                    out += piece;
            }
            pos = next + 1;
        }
        return out;
    }

    const std::size_t n_words = 8 + h % 10;
    std::string out;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (i) out.push_back(' ');
        out += vocab_word(mix64(h ^ (0x51ed27ULL * (i + 1))));
    }
    return out;
}

std::string MockGenerationBackend::model_name() const {
    return "mock-generator:seed=" + std::to_string(opts_.seed);
}

int MockGenerationBackend::parallelism() const { return resolve_parallelism(opts_.parallelism); }

}  // namespace graftkit
