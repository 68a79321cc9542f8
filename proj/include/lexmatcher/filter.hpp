#pragma once

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/lexicon.hpp"
#include "lexmatcher/rational.hpp"

#include <cstdint>
#include <string>

namespace lexmatcher {

/// Thresholds for the rule-based filters and the quality cutoff.
struct FilterConfig {
    int max_words = 100;
    int max_word_chars = 40;
    Rational min_len_ratio{1, 3};
    Rational max_len_ratio{3, 1};
    Rational max_repeat_ratio{3, 10};
    Rational content_word_lo{3, 10};
    Rational content_word_hi{8, 10};
    double min_quality = 0.40; // unit scale
    bool content_rule_inverted = false; // literal reading: reject inside the band
    DedupKey dedup_key = DedupKey::Pair;

    void validate() const; // throws ConfigError on invariant violations
};

/// First failing rule, in the fixed evaluation order.
enum class FilterRule {
    None = 0,
    Duplicate,
    Length,
    EmptySide,
    Ratio,
    Repeat,
    ContentWords,
    Quality,
};

std::string_view filter_rule_name(FilterRule rule);

struct FilterReport {
    std::uint64_t input = 0;
    std::uint64_t retained = 0;
    std::uint64_t duplicate = 0;
    std::uint64_t length = 0;
    std::uint64_t empty_side = 0;
    std::uint64_t ratio = 0;
    std::uint64_t repeat = 0;
    std::uint64_t content_words = 0;
    std::uint64_t quality = 0;
    std::uint64_t missing_score = 0; // kept but unscored (flagged, not rejected)

    std::uint64_t rejected() const {
        return duplicate + length + empty_side + ratio + repeat + content_words + quality;
    }
    std::string to_json() const; // structured per-rule counts
};

// The individual rules; pure functions of their arguments. `true` = keep.
bool rule_length(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res);
FilterRule rule_ratio(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res);
bool rule_repeat(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res);
bool rule_content_words(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res);
bool rule_quality(const SentencePair& pair, const FilterConfig& cfg);

/// First failing rule for one pair (dedup excluded; that is corpus-level).
FilterRule classify_pair(const SentencePair& pair, const FilterConfig& cfg,
                         const PairResources& res);

struct FilterResult {
    Corpus corpus;
    FilterReport report;
};

/// Dedup, then length / ratio / repeat / content-word / quality in fixed
/// order; rejections attributed to the first failing rule, order preserved.
FilterResult run_filters(const Corpus& corpus, const FilterConfig& cfg, const PairResources& res,
                         int threads = 1);

} // namespace lexmatcher
