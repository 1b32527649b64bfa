#include "graftkit/corpus.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "graftkit/error.hpp"
#include "graftkit/rng.hpp"

namespace graftkit {

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "plain" || name == "plain-lines" || name == "lines") return CorpusFormat::plain_lines;
    throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected jsonl or plain-lines)");
}

bool is_punct(unsigned char c) {
    return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
           (c >= 0x7b && c <= 0x7e);
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<Word> tokenize(std::string_view text) {
    std::vector<Word> words;
    auto emit = [&](std::size_t b, std::size_t e) {
        words.push_back(Word{std::string(text.substr(b, e - b)), b, e});
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= n) break;
        std::size_t chunk_end = i;
        while (chunk_end < n && !is_space(static_cast<unsigned char>(text[chunk_end]))) ++chunk_end;

        std::size_t core_begin = i;
        while (core_begin < chunk_end && is_punct(static_cast<unsigned char>(text[core_begin]))) ++core_begin;
        if (core_begin == chunk_end) {
            emit(i, chunk_end);
        } else {
            std::size_t core_end = chunk_end;
            while (core_end > core_begin && is_punct(static_cast<unsigned char>(text[core_end - 1]))) --core_end;
            if (core_begin > i) emit(i, core_begin);
            emit(core_begin, core_end);
            if (core_end < chunk_end) emit(core_end, chunk_end);
        }
        i = chunk_end;
    }
    return words;
}

Document make_document(std::string id, std::string text) {
    Document doc;
    doc.id = std::move(id);
    doc.text = std::move(text);
    doc.words = tokenize(doc.text);
    return doc;
}

namespace {

bool blank(std::string_view line) {
    for (unsigned char c : line)
        if (!is_space(c)) return false;
    return true;
}

}  // namespace

Corpus ingest(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file " + path.string());

    Corpus corpus;
    corpus.source_path = path.string();
    const std::string stem = path.stem().string();
    std::set<std::string> seen;

    std::string line;
    std::size_t line_no = 0;
    for (; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        const std::string where = "line " + std::to_string(line_no + 1);

        std::string id = stem + ":" + std::to_string(line_no);
        std::string text;
        std::map<std::string, std::string> meta;
        if (format == CorpusFormat::plain_lines) {
            text = line;
        } else {
            nlohmann::json rec;
            try {
                rec = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw DataError(where + ": malformed JSON (" + e.what() + ")");
            }
            if (!rec.is_object()) throw DataError(where + ": record is not an object");
            if (!rec.contains("text")) throw DataError(where + ": missing field text");
            if (!rec["text"].is_string()) throw DataError(where + ": field text is not a string");
            text = rec["text"].get<std::string>();
            if (rec.contains("id")) {
                const auto& jid = rec["id"];
                if (jid.is_string()) id = jid.get<std::string>();
                else if (jid.is_number_integer()) id = std::to_string(jid.get<long long>());
                else throw DataError(where + ": field id must be a string or integer");
            }
            if (rec.contains("label")) {
                const auto& jl = rec["label"];
                meta["label"] = jl.is_string() ? jl.get<std::string>() : jl.dump();
            }
        }
        if (!seen.insert(id).second) throw DataError(where + ": duplicate id " + id);
        Document doc = make_document(std::move(id), std::move(text));
        doc.meta = std::move(meta);
        corpus.documents.push_back(std::move(doc));
    }
    if (corpus.documents.empty()) throw DataError("corpus file " + path.string() + " is empty");
    return corpus;
}

Corpus downsample(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be ≥ 1");
    if (n >= corpus.size()) return corpus;
    Rng rng(seed);
    Corpus out;
    out.source_path = corpus.source_path;
    for (std::size_t idx : rng.sample_sorted(corpus.size(), n)) out.documents.push_back(corpus.documents[idx]);
    return out;
}

}  // namespace graftkit
