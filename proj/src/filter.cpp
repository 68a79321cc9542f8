#include "lexmatcher/filter.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/parallel.hpp"
#include "lexmatcher/text.hpp"

#include <nlohmann/json.hpp>

#include <unordered_map>

namespace lexmatcher {

void FilterConfig::validate() const {
    auto positive = [](const Rational& r) { return r.num > 0 && r.den > 0; };
    if (max_words <= 0) throw ConfigError("filter.max_words must be positive");
    if (max_word_chars <= 0) throw ConfigError("filter.max_word_chars must be positive");
    if (!positive(min_len_ratio) || !(min_len_ratio < Rational{1, 1})) {
        throw ConfigError("filter.min_len_ratio must lie in (0, 1)");
    }
    if (!(Rational{1, 1} < max_len_ratio)) throw ConfigError("filter.max_len_ratio must exceed 1");
    if (!positive(max_repeat_ratio) || !(max_repeat_ratio < Rational{1, 1})) {
        throw ConfigError("filter.max_repeat_ratio must lie in (0, 1)");
    }
    if (content_word_lo.num < 0 || !(content_word_lo < content_word_hi) ||
        Rational{1, 1} < content_word_hi) {
        throw ConfigError("filter content-word band must satisfy 0 <= lo < hi <= 1");
    }
    if (min_quality < 0.0 || min_quality > 1.0) {
        throw ConfigError("filter.min_quality must lie in [0, 1]");
    }
}

std::string_view filter_rule_name(FilterRule rule) {
    switch (rule) {
    case FilterRule::None: return "none";
    case FilterRule::Duplicate: return "duplicate";
    case FilterRule::Length: return "length";
    case FilterRule::EmptySide: return "empty_side";
    case FilterRule::Ratio: return "ratio";
    case FilterRule::Repeat: return "repeat";
    case FilterRule::ContentWords: return "content_words";
    case FilterRule::Quality: return "quality";
    }
    return "none";
}

namespace {

bool side_too_long(const std::string& text, const FilterConfig& cfg, const Tokenizer& tokenizer) {
    std::vector<std::string> tokens = tokenizer.tokenize(text);
    if (tokens.size() > static_cast<std::size_t>(cfg.max_words)) return true;
    for (const std::string& token : tokens) {
        if (utf8::length(token) > static_cast<std::size_t>(cfg.max_word_chars)) return true;
    }
    return false;
}

bool side_repeats(const std::string& text, const FilterConfig& cfg, const Tokenizer& tokenizer) {
    std::vector<std::string> tokens = tokenizer.tokenize(text);
    if (tokens.empty()) return false;
    std::unordered_map<std::string_view, std::int64_t> counts;
    std::int64_t max_count = 0;
    for (const std::string& token : tokens) {
        max_count = std::max(max_count, ++counts[token]);
    }
    // Strictly above the threshold rejects; exactly at it keeps.
    return cfg.max_repeat_ratio.ratio_gt(max_count, static_cast<std::int64_t>(tokens.size()));
}

bool side_content_in_band(const std::string& text, const FilterConfig& cfg,
                          const LangResources& res) {
    std::vector<std::string> tokens = res.tokenizer.tokenize(text);
    if (tokens.empty()) return false;
    std::int64_t content = 0;
    for (const std::string& token : tokens) {
        if (!res.stopwords.contains(res.lemmatizer.lemmatize(token))) ++content;
    }
    const auto total = static_cast<std::int64_t>(tokens.size());
    return cfg.content_word_lo.ratio_ge(content, total) && cfg.content_word_hi.ratio_le(content, total);
}

} // namespace

bool rule_length(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res) {
    return !side_too_long(pair.source_text, cfg, res.source.tokenizer) &&
           !side_too_long(pair.target_text, cfg, res.target.tokenizer);
}

FilterRule rule_ratio(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res) {
    const auto src = static_cast<std::int64_t>(res.source.tokenizer.tokenize(pair.source_text).size());
    const auto tgt = static_cast<std::int64_t>(res.target.tokenizer.tokenize(pair.target_text).size());
    if (src == 0 || tgt == 0) return FilterRule::EmptySide;
    // Strict inequalities: a ratio of exactly 1/3 or exactly 3 keeps.
    if (cfg.min_len_ratio.ratio_lt(src, tgt)) return FilterRule::Ratio;
    if (cfg.max_len_ratio.ratio_gt(src, tgt)) return FilterRule::Ratio;
    return FilterRule::None;
}

bool rule_repeat(const SentencePair& pair, const FilterConfig& cfg, const PairResources& res) {
    return !side_repeats(pair.source_text, cfg, res.source.tokenizer) &&
           !side_repeats(pair.target_text, cfg, res.target.tokenizer);
}

bool rule_content_words(const SentencePair& pair, const FilterConfig& cfg,
                        const PairResources& res) {
    bool src_in = side_content_in_band(pair.source_text, cfg, res.source);
    bool tgt_in = side_content_in_band(pair.target_text, cfg, res.target);
    if (cfg.content_rule_inverted) return !(src_in || tgt_in);
    return src_in && tgt_in;
}

bool rule_quality(const SentencePair& pair, const FilterConfig& cfg) {
    if (!pair.quality_score) return true; // unscored pairs pass; reported as flagged
    return !(*pair.quality_score < cfg.min_quality);
}

FilterRule classify_pair(const SentencePair& pair, const FilterConfig& cfg,
                         const PairResources& res) {
    if (!rule_length(pair, cfg, res)) return FilterRule::Length;
    if (FilterRule r = rule_ratio(pair, cfg, res); r != FilterRule::None) return r;
    if (!rule_repeat(pair, cfg, res)) return FilterRule::Repeat;
    if (!rule_content_words(pair, cfg, res)) return FilterRule::ContentWords;
    if (!rule_quality(pair, cfg)) return FilterRule::Quality;
    return FilterRule::None;
}

std::string FilterReport::to_json() const {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["retained"] = retained;
    j["rejected"] = nlohmann::ordered_json{
        {"duplicate", duplicate}, {"length", length},         {"empty_side", empty_side},
        {"ratio", ratio},         {"repeat", repeat},         {"content_words", content_words},
        {"quality", quality},
    };
    j["missing_score"] = missing_score;
    return j.dump(2);
}

FilterResult run_filters(const Corpus& corpus, const FilterConfig& cfg, const PairResources& res,
                         int threads) {
    cfg.validate();
    FilterResult result;
    result.report.input = corpus.size();

    Corpus deduped = deduplicate(corpus, cfg.dedup_key);
    result.report.duplicate = corpus.size() - deduped.size();

    std::vector<FilterRule> decisions(deduped.size(), FilterRule::None);
    parallel_chunks(deduped.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            decisions[i] = classify_pair(deduped.pairs[i], cfg, res);
        }
    });

    result.corpus.source_lang = corpus.source_lang;
    result.corpus.target_lang = corpus.target_lang;
    for (std::size_t i = 0; i < deduped.size(); ++i) {
        const SentencePair& pair = deduped.pairs[i];
        switch (decisions[i]) {
        case FilterRule::None:
            if (!pair.quality_score) ++result.report.missing_score;
            result.corpus.pairs.push_back(pair);
            ++result.report.retained;
            break;
        case FilterRule::Length: ++result.report.length; break;
        case FilterRule::EmptySide: ++result.report.empty_side; break;
        case FilterRule::Ratio: ++result.report.ratio; break;
        case FilterRule::Repeat: ++result.report.repeat; break;
        case FilterRule::ContentWords: ++result.report.content_words; break;
        case FilterRule::Quality: ++result.report.quality; break;
        case FilterRule::Duplicate: break; // handled corpus-level
        }
    }
    return result;
}

} // namespace lexmatcher
