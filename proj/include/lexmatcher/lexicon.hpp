#pragma once

#include "lexmatcher/lemmatizer.hpp"
#include "lexmatcher/stopwords.hpp"
#include "lexmatcher/text.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexmatcher {

/// Everything language-specific a stage needs for one side of the pair.
struct LangResources {
    std::string lang;
    Tokenizer tokenizer;
    Lemmatizer lemmatizer = Lemmatizer::identity();
    StopwordSet stopwords;

    static LangResources for_language(std::string lang_tag) {
        return {lang_tag, Tokenizer::for_language(lang_tag), Lemmatizer::for_language(lang_tag), {}};
    }
};

struct PairResources {
    LangResources source;
    LangResources target;
};

enum class Pos { Noun, Verb, Adj, Adv, Other };

Pos parse_pos(std::string_view text);
std::string_view pos_name(Pos pos);

enum class SenseOrigin { Dictionary, Entity };

/// One dictionary entry (s, t): lemma-normalized segments plus metadata.
struct SensePair {
    std::vector<std::string> source_segment;
    std::vector<std::string> target_segment;
    Pos pos = Pos::Other;
    bool has_pos = false;
    std::string sense_id;
    std::string definition;
    SenseOrigin origin = SenseOrigin::Dictionary;

    std::string source_key() const;
    std::string target_key() const;
};

struct LexiconLoadStats {
    std::size_t loaded = 0;
    std::size_t dropped_stopword_only = 0;
    std::size_t dropped_too_long = 0;
    std::size_t duplicates = 0;
};

/// Segment-lookup index over SensePairs. Immutable once built; entries keep
/// insertion order (dictionary first, then entities), which fixes match order.
class Lexicon {
public:
    explicit Lexicon(int max_segment_len = 8) : max_segment_len_(max_segment_len) {}

    const std::vector<SensePair>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// All entries whose source segment equals the query, in insertion order.
    std::span<const std::uint32_t> lookup_ids(std::string_view source_key) const;
    std::vector<const SensePair*> lookup(const std::vector<std::string>& source_segment) const;

    /// Longest source segment present (0 when empty).
    std::size_t max_source_len() const { return max_source_len_; }
    int max_segment_len() const { return max_segment_len_; }

    const LexiconLoadStats& dictionary_stats() const { return dictionary_stats_; }
    const LexiconLoadStats& entity_stats() const { return entity_stats_; }

    /// Used by loaders; returns false when the (s, t, sense_id) key is a duplicate.
    bool add(SensePair entry);

private:
    friend Lexicon load_dictionary(const std::filesystem::path&, const PairResources&, int);
    friend void merge_entities(Lexicon&, const std::filesystem::path&, const PairResources&);

    std::vector<SensePair> entries_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> index_;
    std::unordered_map<std::string, std::uint32_t> identity_; // (s,t,sense_id) -> entry
    std::size_t max_source_len_ = 0;
    int max_segment_len_;
    std::size_t entity_count_ = 0;
    LexiconLoadStats dictionary_stats_;
    LexiconLoadStats entity_stats_;
};

/// Dictionary TSV: `source \t target \t pos \t sense_id [\t definition]`.
/// Segments are tokenized and lemma-normalized per side; entries whose source
/// contains only stopwords are dropped (counted), as are dictionary sources
/// longer than two tokens.
Lexicon load_dictionary(const std::filesystem::path& path, const PairResources& res,
                        int max_segment_len = 8);

/// Entity list TSV: `source_title \t target_title`. Titles longer than
/// max_segment_len are dropped (counted). Entity sense ids are "ent.NNNNNN".
void merge_entities(Lexicon& lexicon, const std::filesystem::path& titles_path,
                    const PairResources& res);

struct CandidateSegment {
    std::size_t position = 0;
    std::size_t length = 0;
    std::string key; // space-joined lemmas
};

/// Enumerates lookup candidates over a lemmatized sentence: all non-stopword
/// unigrams left to right, then bigrams with neither lemma a stopword, then
/// (for entity lookup) plain n-grams of length 3..max_len.
std::vector<CandidateSegment> candidate_segments(const std::vector<std::string>& lemmas,
                                                 const StopwordSet& stopwords,
                                                 std::size_t max_len);

/// Joins lemma tokens into the index key (single spaces).
std::string segment_key(const std::vector<std::string>& tokens);
std::string segment_key(const std::vector<std::string>& tokens, std::size_t begin, std::size_t count);

} // namespace lexmatcher
