#include <doctest.h>

#include <atomic>

#include "graftkit/mock_backend.hpp"
#include "graftkit/scoring.hpp"
#include "graftkit/scoring_cache.hpp"
#include "support.hpp"

using namespace graftkit;

namespace {

class CountingScorer final : public ScoringBackend {
public:
    std::vector<ScoredToken> score(const ScoringRequest& req) override {
        ++calls;
        return inner.score(req);
    }
    std::string model_name() const override { return inner.model_name(); }

    MockScoringBackend inner{{.seed = 3}};
    std::atomic<int> calls{0};
};

}  // namespace

TEST_CASE("cached backend serves repeats from disk") {
    gk_test::TempDir dir;
    auto inner = std::make_shared<CountingScorer>();
    auto cache = std::make_shared<ScoringCache>(dir.path());
    CachedScoringBackend cached(inner, cache);
    const ScoringRequest req{"Please write a Tweet.", "wow, café!"};
    const auto first = cached.score(req);
    const auto second = cached.score(req);
    CHECK(inner->calls == 1);
    CHECK(cached.hits() == 1);
    CHECK(cached.misses() == 1);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].surface == second[i].surface);
        CHECK(first[i].logprob == second[i].logprob);
        CHECK(first[i].start == second[i].start);
        CHECK(first[i].end == second[i].end);
    }

    // A fresh decorator over the same directory still hits.
    auto inner2 = std::make_shared<CountingScorer>();
    CachedScoringBackend again(inner2, std::make_shared<ScoringCache>(dir.path()));
    again.score(req);
    CHECK(inner2->calls == 0);
}

TEST_CASE("cache keys separate model, instruction and text") {
    const ScoringRequest a{"ab", "c"}, b{"a", "bc"}, c{"ab", "c "};
    CHECK(ScoringCache::key("m", a) != ScoringCache::key("m", b));
    CHECK(ScoringCache::key("m", a) != ScoringCache::key("m", c));
    CHECK(ScoringCache::key("m", a) != ScoringCache::key("n", a));
    CHECK(ScoringCache::key("m", a) == ScoringCache::key("m", ScoringRequest{"ab", "c"}));
    CHECK(ScoringCache::key("m", a).size() == 64);
}

TEST_CASE("cache round-trips exact doubles") {
    gk_test::TempDir dir;
    ScoringCache cache(dir.path());
    std::vector<ScoredToken> toks = {{"a", -0.1, 0, 1}, {" b", -1e-300, 1, 3}, {"!", -123.456789012345678, 3, 4}};
    cache.store("k1", toks);
    const auto back = cache.load("k1");
    REQUIRE(back.has_value());
    REQUIRE(back->size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK((*back)[i].logprob == toks[i].logprob);
    CHECK_FALSE(cache.load("absent").has_value());
}

TEST_CASE("parallel scoring through the cache matches uncached scoring") {
    gk_test::TempDir dir;
    const auto corpus = gk_test::random_corpus(41, 80, 1, 15);
    const TaskSpec task("Surprised", "Tweet");
    MockScoringBackend plain({.seed = 3});
    const auto ref = score_corpus_serial(corpus, task, plain);
    auto cached = std::make_shared<CachedScoringBackend>(std::make_shared<MockScoringBackend>(MockScorerOptions{.seed = 3}),
                                                         std::make_shared<ScoringCache>(dir.path()));
    unsigned long long misses_after_first = 0, hits_after_first = 0;
    for (int pass = 0; pass < 2; ++pass) {
        if (pass == 1) {
            misses_after_first = cached->misses();
            hits_after_first = cached->hits();
        }
        const auto got = score_corpus(corpus, task, *cached, 8);
        REQUIRE(got.documents.size() == ref.documents.size());
        for (std::size_t i = 0; i < got.documents.size(); ++i)
            for (std::size_t w = 0; w < got.documents[i].potentials.size(); ++w)
                CHECK(got.documents[i].potentials[w].delta_p == ref.documents[i].potentials[w].delta_p);
    }
    CHECK(misses_after_first + hits_after_first == 160);
    CHECK(cached->misses() == misses_after_first);
    CHECK(cached->hits() == hits_after_first + 160);
}
