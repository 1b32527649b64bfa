#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "graftkit/corpus.hpp"
#include "graftkit/rng.hpp"

namespace gk_test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("graftkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> v = {
        "i",     "cant",  "believe", "this",  "when", "luck",  "feel",   "wow",    "the",  "a",
        "today", "again", "night",   "city",  "my",   "cat",   "so",     "happy",  "sad",  "tired",
        "love",  "rain",  "coffee",  "work",  "what", "just",  "really", "friend", "why",  "café",
        "naïve", "ok",    "lol",     "never", "ever", "bus",   "late",   "early",  "fun",  "here"};
    return v;
}

// Random tweet-like text: n words, with occasional punctuation attached.
inline std::string random_text(graftkit::Rng& rng, std::size_t n) {
    static const char* punct[] = {"!", ",", ".", "?", "!!", "#", "..."};
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        if (rng.below(10) == 0) out += punct[rng.below(7)];
        out += vocabulary()[rng.below(vocabulary().size())];
        if (rng.below(6) == 0) out += punct[rng.below(7)];
    }
    return out;
}

inline graftkit::Corpus random_corpus(std::uint64_t seed, std::size_t docs, std::size_t min_words,
                                      std::size_t max_words) {
    graftkit::Rng rng(seed);
    graftkit::Corpus c;
    c.source_path = "synthetic";
    for (std::size_t i = 0; i < docs; ++i) {
        const auto n = min_words + rng.below(max_words - min_words + 1);
        c.documents.push_back(graftkit::make_document("doc" + std::to_string(i), random_text(rng, n)));
    }
    return c;
}

// Values on the dyadic grid k/8 in [-8, 8]: sums and means over a handful stay exact.
inline std::vector<double> dyadic_values(graftkit::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = (static_cast<double>(rng.below(129)) - 64.0) / 8.0;
    return v;
}

}  // namespace gk_test
