#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace graftkit {

/// A word span inside a document. Offsets are UTF-8 byte offsets, end exclusive.
struct Word {
    std::string surface;
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Word&) const = default;
};

struct Document {
    std::string id;
    std::string text;
    std::vector<Word> words;
    /// Evaluation-only fields such as the gold label. Never read by mining or synthesis.
    std::map<std::string, std::string> meta;
};

struct Corpus {
    std::vector<Document> documents;
    std::string source_path;

    std::size_t size() const { return documents.size(); }
};

enum class CorpusFormat { jsonl, plain_lines };

CorpusFormat parse_corpus_format(std::string_view name);

/// True for ASCII punctuation; these characters are peeled off word edges.
bool is_punct(unsigned char c);
bool is_space(unsigned char c);

/// Whitespace split, then leading and trailing punctuation runs are split
/// off as their own words. A chunk made only of punctuation stays one word.
std::vector<Word> tokenize(std::string_view text);

Document make_document(std::string id, std::string text);

/// One document per record or line, ids `<stem>:<line>` (0-based) when absent.
/// Blank lines are skipped but still count toward line numbering.
Corpus ingest(const std::filesystem::path& path, CorpusFormat format);

/// min(n, |corpus|) documents drawn uniformly without replacement; survivors keep their order.
Corpus downsample(const Corpus& corpus, std::size_t n, std::uint64_t seed);

}  // namespace graftkit
