#include <doctest.h>

#include <set>

#include "graftkit/corpus.hpp"
#include "graftkit/error.hpp"
#include "support.hpp"

using namespace graftkit;

namespace {

std::vector<std::string> surfaces(const std::vector<Word>& words) {
    std::vector<std::string> out;
    for (const auto& w : words) out.push_back(w.surface);
    return out;
}

// Hand segmentation: whitespace chunks, then leading and trailing ASCII
// punctuation runs split off as single words.
std::vector<std::string> hand_segment(const std::string& text) {
    std::vector<std::string> out;
    std::string chunk;
    auto flush = [&] {
        if (chunk.empty()) return;
        std::size_t a = 0, b = chunk.size();
        while (a < b && std::ispunct(static_cast<unsigned char>(chunk[a]))) ++a;
        while (b > a && std::ispunct(static_cast<unsigned char>(chunk[b - 1]))) --b;
        if (a == b) {
            out.push_back(chunk);
        } else {
            if (a > 0) out.push_back(chunk.substr(0, a));
            out.push_back(chunk.substr(a, b - a));
            if (b < chunk.size()) out.push_back(chunk.substr(b));
        }
        chunk.clear();
    };
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n') flush();
        else chunk += c;
    }
    flush();
    return out;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace with byte spans") {
    const auto words = tokenize("i cant believe this");
    REQUIRE(words.size() == 4);
    const std::vector<std::pair<std::size_t, std::size_t>> spans{{0, 1}, {2, 6}, {7, 14}, {15, 19}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(words[i].start == spans[i].first);
        CHECK(words[i].end == spans[i].second);
    }
}

TEST_CASE("tokenize of empty and blank text") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n").empty());
}

TEST_CASE("tokenize peels punctuation: Wow!") {
    const auto words = tokenize("Wow!");
    CHECK(surfaces(words) == hand_segment("Wow!"));
    CHECK(surfaces(words) == std::vector<std::string>{"Wow", "!"});
    CHECK(words[1].start == 3);
    CHECK(words[1].end == 4);
}

TEST_CASE("tokenize keeps inner punctuation and all-punctuation chunks") {
    CHECK(surfaces(tokenize("can't stop... (really)")) ==
          std::vector<std::string>{"can't", "stop", "...", "(", "really", ")"});
    CHECK(surfaces(tokenize("!!! ok")) == std::vector<std::string>{"!!!", "ok"});
}

TEST_CASE("tokenize keeps UTF-8 bytes inside words") {
    const std::string text = "naïve café!";
    const auto words = tokenize(text);
    REQUIRE(words.size() == 3);
    CHECK(words[0].surface == "naïve");
    CHECK(words[1].surface == "café");
    CHECK(text.substr(words[1].start, words[1].end - words[1].start) == "café");
}

TEST_CASE("property: tokenize matches hand segmentation and spans index the text") {
    Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const auto text = gk_test::random_text(rng, 1 + rng.below(20));
        const auto words = tokenize(text);
        CHECK(surfaces(words) == hand_segment(text));
        std::size_t prev_end = 0;
        for (const auto& w : words) {
            CHECK(w.start >= prev_end);
            CHECK(w.end > w.start);
            CHECK(text.substr(w.start, w.end - w.start) == w.surface);
            prev_end = w.end;
        }
        CHECK(tokenize(text) == words);
    }
}

TEST_CASE("ingest plain lines assigns stem:line ids") {
    gk_test::TempDir dir;
    gk_test::write_file(dir / "corpus.txt", "one\ntwo words\nthree!\n");
    const auto c = ingest(dir / "corpus.txt", CorpusFormat::plain_lines);
    REQUIRE(c.size() == 3);
    CHECK(c.documents[0].id == "corpus:0");
    CHECK(c.documents[2].id == "corpus:2");
    CHECK(c.documents[1].words.size() == 2);
}

TEST_CASE("ingest jsonl keeps given ids and labels") {
    gk_test::TempDir dir;
    gk_test::write_file(dir / "c.jsonl", "{\"id\":\"a\",\"text\":\"hi\"}\n\n{\"text\":\"yo\",\"label\":\"joy\"}\n");
    const auto c = ingest(dir / "c.jsonl", CorpusFormat::jsonl);
    REQUIRE(c.size() == 2);
    CHECK(c.documents[0].id == "a");
    CHECK(c.documents[0].text == "hi");
    CHECK(c.documents[1].id == "c:2");
    CHECK(c.documents[1].meta.at("label") == "joy");
}

TEST_CASE("ingest reports the 1-based line of a missing text field") {
    gk_test::TempDir dir;
    gk_test::write_file(dir / "c.jsonl",
                        "{\"text\":\"a\"}\n{\"text\":\"b\"}\n{\"text\":\"c\"}\n{\"text\":\"d\"}\n{\"id\":\"x\"}\n");
    CHECK_THROWS_WITH_AS(ingest(dir / "c.jsonl", CorpusFormat::jsonl), "line 5: missing field text", DataError);
}

TEST_CASE("ingest rejects duplicates, empty files and missing files") {
    gk_test::TempDir dir;
    gk_test::write_file(dir / "dup.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
    CHECK_THROWS_AS(ingest(dir / "dup.jsonl", CorpusFormat::jsonl), DataError);
    gk_test::write_file(dir / "empty.txt", "\n\n");
    CHECK_THROWS_AS(ingest(dir / "empty.txt", CorpusFormat::plain_lines), DataError);
    CHECK_THROWS_AS(ingest(dir / "nope.txt", CorpusFormat::plain_lines), DataError);
}

TEST_CASE("parse_corpus_format") {
    CHECK(parse_corpus_format("jsonl") == CorpusFormat::jsonl);
    CHECK(parse_corpus_format("plain") == CorpusFormat::plain_lines);
    CHECK_THROWS_AS(parse_corpus_format("csv"), ConfigError);
}

TEST_CASE("downsample") {
    const auto big = gk_test::random_corpus(3, 10000, 1, 4);
    const auto same = downsample(big, 10000, 1);
    CHECK(same.size() == big.size());
    CHECK(same.documents.back().id == big.documents.back().id);

    const auto ten = gk_test::random_corpus(4, 10, 2, 5);
    const auto a = downsample(ten, 3, 7), b = downsample(ten, 3, 7);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.documents[i].id == b.documents[i].id);
    CHECK(a.documents[0].id < a.documents[1].id);

    CHECK_THROWS_WITH_AS(downsample(ten, 0, 7), "n must be ≥ 1", std::invalid_argument);
}

TEST_CASE("property: downsample draws distinct documents in corpus order") {
    Rng rng(55);
    const auto corpus = gk_test::random_corpus(5, 50, 1, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 1 + rng.below(60);
        const auto s = downsample(corpus, n, rng.next());
        CHECK(s.size() == std::min<std::size_t>(n, 50));
        std::set<std::string> ids;
        std::size_t last = 0;
        for (const auto& d : s.documents) {
            ids.insert(d.id);
            const auto idx = std::stoul(d.id.substr(3));
            CHECK((ids.size() == 1 || idx > last));
            last = idx;
        }
        CHECK(ids.size() == s.size());
    }
}
