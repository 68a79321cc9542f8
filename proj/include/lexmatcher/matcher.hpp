#pragma once

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/lexicon.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lexmatcher {

/// Per-sense match counter, bounded by the context budget K.
class CountTable {
public:
    CountTable(std::size_t sense_count, int k) : k_(k), counts_(sense_count, 0) {}

    int k() const { return k_; }
    bool below_cap(std::uint32_t sense) const {
        return static_cast<int>(counts_[sense]) < k_;
    }
    void increment(std::uint32_t sense) { ++counts_[sense]; }
    std::uint32_t count(std::uint32_t sense) const { return counts_[sense]; }
    const std::vector<std::uint32_t>& counts() const { return counts_; }
    std::uint64_t total_increments() const;

private:
    int k_;
    std::vector<std::uint32_t> counts_;
};

/// One matched sense occurrence inside a sentence.
struct SenseMatch {
    std::uint32_t sense = 0;    // index into Lexicon::entries()
    std::uint32_t position = 0; // source token position
    std::uint32_t length = 0;   // source segment token count
};

struct MatchRecord {
    std::uint64_t pair_index = 0;
    std::vector<SenseMatch> matched;
    bool selected = false;
};

struct CoverageReport {
    int k = 0;
    std::uint64_t subset_size = 0;
    std::vector<std::string> covered;   // sense ids with count >= 1, lexicon order
    std::vector<std::string> uncovered; // sense ids with count == 0, lexicon order
    std::map<std::uint32_t, std::uint64_t> histogram; // count value -> number of senses
    std::vector<std::uint32_t> counts;  // final per-sense counts, lexicon order

    std::string to_json() const;
    static CoverageReport from_json(const std::string& text);
};

/// Quality-descending order; ties and unscored pairs fall back to the
/// original index (stable and deterministic). Unscored pairs sort last.
Corpus rank_corpus(const Corpus& corpus);

struct RetrieveOptions {
    bool rank = true;
    int threads = 1;
    // Optional pre-lemmatized sidecars, indexed by SentencePair::index.
    const std::vector<std::vector<std::string>>* source_lemmas = nullptr;
    const std::vector<std::vector<std::string>>* target_lemmas = nullptr;
};

/// One step of the retrieval loop: finds every candidate segment of the pair
/// in the lexicon, and for each sense still below the cap whose target
/// segment occurs contiguously in the lemmatized target sentence, increments
/// the count immediately and records the match.
MatchRecord match_sentence(const SentencePair& pair, const Lexicon& lexicon, CountTable& table,
                           const PairResources& res);

struct RetrieveResult {
    Corpus subset;                    // S_r in traversal order
    CoverageReport coverage;
    std::vector<MatchRecord> records; // aligned to subset.pairs
};

/// Ranked traversal with per-sense budget k; deterministic for fixed inputs
/// regardless of thread count.
RetrieveResult retrieve(const Corpus& corpus, const Lexicon& lexicon, int k,
                        const PairResources& res, const RetrieveOptions& options = {});

/// Uncovered noun/verb senses whose (source segment, pos) group carries more
/// than three sense ids; sorted by source segment then sense id.
std::vector<const SensePair*> coverage_gaps(const CoverageReport& report, const Lexicon& lexicon);

// Artifact files: subset.src/subset.tgt are written with save_corpus;
// coverage.json via CoverageReport::to_json. matches.jsonl carries one line
// per selected pair with the surface segments needed downstream.
void write_matches_jsonl(const std::filesystem::path& path, const RetrieveResult& result,
                         const Lexicon& lexicon, const PairResources& res);

/// matches.jsonl line, re-read for the SFT builder (no lexicon needed).
struct MatchedSegment {
    std::string sense_id;
    std::string source_segment; // lemma key
    std::string target_segment; // lemma key
    std::uint32_t position = 0;
    std::uint32_t length = 0;
    std::string surface;        // source surface text as it appeared in the sentence
    std::string target_surface; // target segment rendered for display
};

struct LoadedMatchRecord {
    std::uint64_t pair_index = 0;
    std::vector<MatchedSegment> matched;
};

std::vector<LoadedMatchRecord> read_matches_jsonl(const std::filesystem::path& path);

} // namespace lexmatcher
