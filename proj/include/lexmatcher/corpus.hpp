#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lexmatcher {

/// One aligned sentence pair; the unit every stage operates on.
struct SentencePair {
    std::uint64_t index = 0; // 0-based position in the source file
    std::string source_text;
    std::string target_text;
    std::optional<double> quality_score; // unit scale, in [0,1]
};

struct Corpus {
    std::vector<SentencePair> pairs;
    std::string source_lang;
    std::string target_lang;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

enum class ScoreScale { Unit, Percent };

enum class DedupKey { Pair, Source, Target };

/// Reads one sentence per line from two line-aligned UTF-8 files. Only the
/// trailing newline (and a trailing "\r" from CRLF files) is stripped.
Corpus load_corpus(const std::filesystem::path& source_path,
                   const std::filesystem::path& target_path,
                   const std::string& source_lang, const std::string& target_lang);

/// Attaches one score per pair from a sidecar file (one decimal per line).
/// Percent-scale files are divided by 100 at load; stored scores are unit scale.
Corpus attach_scores(Corpus corpus, const std::filesystem::path& scores_path,
                     ScoreScale scale = ScoreScale::Percent);

/// Keeps the first occurrence of each key (trim + collapsed whitespace);
/// relative order is preserved. Key defaults to the (source, target) pair.
Corpus deduplicate(const Corpus& corpus, DedupKey key = DedupKey::Pair);

/// Writes pairs back to line-aligned files ("\n" endings, trailing newline
/// when non-empty). Optionally writes the aligned unit-scale score file.
void save_corpus(const Corpus& corpus, const std::filesystem::path& source_path,
                 const std::filesystem::path& target_path);
void save_scores(const Corpus& corpus, const std::filesystem::path& scores_path);

/// Plain line loader shared by the stats CLI and fixtures.
std::vector<std::string> read_lines(const std::filesystem::path& path);

} // namespace lexmatcher
