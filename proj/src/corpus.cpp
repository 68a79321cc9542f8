#include "lexmatcher/corpus.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/text.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_set>

namespace lexmatcher {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return lines;
}

Corpus load_corpus(const std::filesystem::path& source_path,
                   const std::filesystem::path& target_path,
                   const std::string& source_lang, const std::string& target_lang) {
    std::vector<std::string> src = read_lines(source_path);
    std::vector<std::string> tgt = read_lines(target_path);
    if (src.size() != tgt.size()) {
        throw AlignmentError("line count mismatch: " + source_path.string() + " has " +
                             std::to_string(src.size()) + " lines, " + target_path.string() +
                             " has " + std::to_string(tgt.size()));
    }
    Corpus corpus;
    corpus.source_lang = source_lang;
    corpus.target_lang = target_lang;
    corpus.pairs.reserve(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        corpus.pairs.push_back({i, std::move(src[i]), std::move(tgt[i]), std::nullopt});
    }
    return corpus;
}

Corpus attach_scores(Corpus corpus, const std::filesystem::path& scores_path, ScoreScale scale) {
    std::vector<std::string> lines = read_lines(scores_path);
    if (lines.size() != corpus.pairs.size()) {
        throw AlignmentError("score count mismatch: " + scores_path.string() + " has " +
                             std::to_string(lines.size()) + " lines, corpus has " +
                             std::to_string(corpus.pairs.size()) + " pairs");
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view text = trim(lines[i]);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw ParseError(scores_path.string(), i + 1, "unparseable score '" + std::string(text) + "'");
        }
        if (scale == ScoreScale::Percent) value /= 100.0;
        if (value < 0.0 || value > 1.0) {
            throw ParseError(scores_path.string(), i + 1,
                             "score out of range after scaling: " + std::to_string(value));
        }
        corpus.pairs[i].quality_score = value;
    }
    return corpus;
}

Corpus deduplicate(const Corpus& corpus, DedupKey key) {
    Corpus out;
    out.source_lang = corpus.source_lang;
    out.target_lang = corpus.target_lang;
    out.pairs.reserve(corpus.pairs.size());
    std::unordered_set<std::string> seen;
    seen.reserve(corpus.pairs.size() * 2);
    for (const SentencePair& pair : corpus.pairs) {
        std::string k;
        switch (key) {
        case DedupKey::Pair:
            k = collapse_whitespace(pair.source_text);
            k.push_back('\x1f'); // pair key; \x1f cannot occur in collapsed text columns
            k += collapse_whitespace(pair.target_text);
            break;
        case DedupKey::Source:
            k = collapse_whitespace(pair.source_text);
            break;
        case DedupKey::Target:
            k = collapse_whitespace(pair.target_text);
            break;
        }
        if (seen.insert(std::move(k)).second) out.pairs.push_back(pair);
    }
    return out;
}

namespace {

void write_lines_or_throw(const std::filesystem::path& path,
                          const Corpus& corpus, bool source_side) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const SentencePair& pair : corpus.pairs) {
        out << (source_side ? pair.source_text : pair.target_text) << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

} // namespace

void save_corpus(const Corpus& corpus, const std::filesystem::path& source_path,
                 const std::filesystem::path& target_path) {
    write_lines_or_throw(source_path, corpus, true);
    write_lines_or_throw(target_path, corpus, false);
}

void save_scores(const Corpus& corpus, const std::filesystem::path& scores_path) {
    std::ofstream out(scores_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + scores_path.string());
    char buf[64];
    for (const SentencePair& pair : corpus.pairs) {
        if (!pair.quality_score) {
            throw Error("pair " + std::to_string(pair.index) +
                        " has no quality score; cannot write " + scores_path.string());
        }
        std::snprintf(buf, sizeof(buf), "%.6f", *pair.quality_score);
        out << buf << '\n';
    }
    if (!out) throw IoError("write failure on " + scores_path.string());
}

} // namespace lexmatcher
