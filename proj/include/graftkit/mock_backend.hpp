#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graftkit/backend.hpp"

namespace graftkit {

/// Logprob quantum of the mock scorer. Every mock logprob is an integer
/// multiple of 2^-20, so sums over a few thousand tokens are exact in double
/// precision and constant shifts commute with summation bit-for-bit.
inline constexpr double kMockLogprobQuantum = 1.0 / 1048576.0;

/// Pure function of (token, instruction, seed) in [-10, 0].
///   h = mix64(fnv1a64(seed as 8 LE bytes ++ instruction ++ 0x1f ++ token))
///   value = -10 * (h >> 44) / 2^20
double mock_logprob(std::string_view token, std::string_view instruction, std::uint64_t seed);

/// Byte spans of the mock tokenizer. Leading whitespace attaches to the
/// following piece; a piece is one punctuation byte or up to four other
/// bytes (UTF-8 sequences are never split). Trailing whitespace becomes its
/// own token, so the spans always tile the text.
std::vector<std::pair<std::size_t, std::size_t>> mock_token_spans(std::string_view text);

/// Raises the logprob of listed words whenever the instruction mentions `cue`.
/// Lets tests plant class-indicative words in an otherwise random scorer.
struct MockAffinity {
    std::string cue;
    std::vector<std::string> words;
    double bonus = 4.0;
};

struct MockScorerOptions {
    std::uint64_t seed = 0;
    /// Added to every token logprob; must be a multiple of kMockLogprobQuantum to stay exact.
    double shift = 0.0;
    std::vector<MockAffinity> affinities;
    int parallelism = 0;  // 0 = OpenMP default
};

class MockScoringBackend final : public ScoringBackend {
public:
    explicit MockScoringBackend(MockScorerOptions opts = {});
    std::vector<ScoredToken> score(const ScoringRequest& req) override;
    std::string model_name() const override;
    int parallelism() const override;

    const MockScorerOptions& options() const { return opts_; }

private:
    MockScorerOptions opts_;
};

struct MockGeneratorOptions {
    std::uint64_t seed = 0;
    std::string mask_token = "_";
    /// When set, every blank is filled with this word; otherwise words come from a fixed vocabulary.
    std::optional<std::string> fill_word;
    /// When set, every call returns exactly this string (used to exercise failure paths).
    std::optional<std::string> constant;
    int parallelism = 0;
};

/// Deterministic generator. For fill prompts (a line starting "Template: ")
/// it echoes the template with each blank replaced by one word. For any other
/// prompt it emits a pseudo-sentence hashed from the prompt and seeds.
class MockGenerationBackend final : public GenerationBackend {
public:
    explicit MockGenerationBackend(MockGeneratorOptions opts = {});
    std::string generate(const GenerationRequest& req) override;
    std::string model_name() const override;
    int parallelism() const override;

private:
    MockGeneratorOptions opts_;
};

}  // namespace graftkit
