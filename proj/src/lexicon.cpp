#include "lexmatcher/lexicon.hpp"

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/error.hpp"

#include <algorithm>
#include <cstdio>

namespace lexmatcher {

Pos parse_pos(std::string_view text) {
    if (text == "noun" || text == "n") return Pos::Noun;
    if (text == "verb" || text == "v") return Pos::Verb;
    if (text == "adj" || text == "a" || text == "adjective") return Pos::Adj;
    if (text == "adv" || text == "r" || text == "adverb") return Pos::Adv;
    return Pos::Other;
}

std::string_view pos_name(Pos pos) {
    switch (pos) {
    case Pos::Noun: return "noun";
    case Pos::Verb: return "verb";
    case Pos::Adj: return "adj";
    case Pos::Adv: return "adv";
    case Pos::Other: return "other";
    }
    return "other";
}

std::string segment_key(const std::vector<std::string>& tokens, std::size_t begin,
                        std::size_t count) {
    std::string key;
    for (std::size_t i = begin; i < begin + count; ++i) {
        if (i > begin) key.push_back(' ');
        key += tokens[i];
    }
    return key;
}

std::string segment_key(const std::vector<std::string>& tokens) {
    return segment_key(tokens, 0, tokens.size());
}

std::string SensePair::source_key() const { return segment_key(source_segment); }
std::string SensePair::target_key() const { return segment_key(target_segment); }

std::span<const std::uint32_t> Lexicon::lookup_ids(std::string_view source_key) const {
    auto it = index_.find(std::string(source_key));
    if (it == index_.end()) return {};
    return {it->second.data(), it->second.size()};
}

std::vector<const SensePair*> Lexicon::lookup(const std::vector<std::string>& source_segment) const {
    std::vector<const SensePair*> out;
    for (std::uint32_t id : lookup_ids(segment_key(source_segment))) {
        out.push_back(&entries_[id]);
    }
    return out;
}

bool Lexicon::add(SensePair entry) {
    std::string identity = entry.source_key();
    identity.push_back('\t');
    identity += entry.target_key();
    identity.push_back('\t');
    // Entity ids are generated, so entity identity is the (s, t) pair itself;
    // duplicate title lines collapse instead of minting fresh senses.
    identity += entry.origin == SenseOrigin::Entity ? "@entity" : entry.sense_id;
    auto [it, inserted] = identity_.emplace(std::move(identity), static_cast<std::uint32_t>(entries_.size()));
    if (!inserted) return false;
    max_source_len_ = std::max(max_source_len_, entry.source_segment.size());
    index_[entry.source_key()].push_back(static_cast<std::uint32_t>(entries_.size()));
    entries_.push_back(std::move(entry));
    return true;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

std::vector<std::string> normalize_segment(std::string_view text, const LangResources& res) {
    return res.lemmatizer.lemmatize_all(res.tokenizer.tokenize(text));
}

bool all_stopwords(const std::vector<std::string>& lemmas, const StopwordSet& stopwords) {
    for (const std::string& lemma : lemmas) {
        if (!stopwords.contains(lemma)) return false;
    }
    return true;
}

} // namespace

Lexicon load_dictionary(const std::filesystem::path& path, const PairResources& res,
                        int max_segment_len) {
    Lexicon lexicon(max_segment_len);
    LexiconLoadStats& stats = lexicon.dictionary_stats_;
    std::size_t line_no = 0;
    for (const std::string& raw : read_lines(path)) {
        ++line_no;
        std::string_view line = raw;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields = split_tabs(line);
        if (fields.size() < 4 || fields.size() > 5) {
            throw ParseError(path.string(), line_no,
                             "expected 4 or 5 tab-separated fields, got " +
                                 std::to_string(fields.size()));
        }
        SensePair entry;
        entry.source_segment = normalize_segment(fields[0], res.source);
        entry.target_segment = normalize_segment(fields[1], res.target);
        std::string_view pos_field = trim(fields[2]);
        entry.pos = parse_pos(pos_field);
        entry.has_pos = !pos_field.empty();
        entry.sense_id = std::string(trim(fields[3]));
        if (fields.size() == 5) entry.definition = std::string(trim(fields[4]));
        entry.origin = SenseOrigin::Dictionary;
        if (entry.source_segment.empty() || entry.target_segment.empty() || entry.sense_id.empty()) {
            throw ParseError(path.string(), line_no, "empty segment or sense id");
        }
        if (all_stopwords(entry.source_segment, res.source.stopwords)) {
            ++stats.dropped_stopword_only;
            continue;
        }
        if (entry.source_segment.size() > 2) {
            // Dictionary sources are unigrams/bigrams; longer ones belong in
            // the entity list.
            ++stats.dropped_too_long;
            continue;
        }
        if (lexicon.add(std::move(entry))) {
            ++stats.loaded;
        } else {
            ++stats.duplicates;
        }
    }
    return lexicon;
}

void merge_entities(Lexicon& lexicon, const std::filesystem::path& titles_path,
                    const PairResources& res) {
    LexiconLoadStats& stats = lexicon.entity_stats_;
    std::size_t line_no = 0;
    for (const std::string& raw : read_lines(titles_path)) {
        ++line_no;
        std::string_view line = raw;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields = split_tabs(line);
        if (fields.size() != 2) {
            throw ParseError(titles_path.string(), line_no,
                             "expected 2 tab-separated fields, got " + std::to_string(fields.size()));
        }
        SensePair entry;
        entry.source_segment = normalize_segment(fields[0], res.source);
        entry.target_segment = normalize_segment(fields[1], res.target);
        if (entry.source_segment.empty() || entry.target_segment.empty()) {
            throw ParseError(titles_path.string(), line_no, "empty title");
        }
        if (entry.source_segment.size() > static_cast<std::size_t>(lexicon.max_segment_len())) {
            ++stats.dropped_too_long;
            continue;
        }
        if (all_stopwords(entry.source_segment, res.source.stopwords)) {
            ++stats.dropped_stopword_only;
            continue;
        }
        entry.origin = SenseOrigin::Entity;
        char id[24];
        std::snprintf(id, sizeof(id), "ent.%06zu", lexicon.entity_count_);
        entry.sense_id = id;
        if (lexicon.add(std::move(entry))) {
            ++stats.loaded;
            ++lexicon.entity_count_;
        } else {
            ++stats.duplicates;
        }
    }
}

std::vector<CandidateSegment> candidate_segments(const std::vector<std::string>& lemmas,
                                                 const StopwordSet& stopwords,
                                                 std::size_t max_len) {
    std::vector<CandidateSegment> out;
    const std::size_t n = lemmas.size();
    std::vector<bool> is_stop(n);
    for (std::size_t i = 0; i < n; ++i) is_stop[i] = stopwords.contains(lemmas[i]);
    for (std::size_t len = 1; len <= max_len && len <= n; ++len) {
        for (std::size_t pos = 0; pos + len <= n; ++pos) {
            if (len == 1 && is_stop[pos]) continue;
            if (len == 2 && (is_stop[pos] || is_stop[pos + 1])) continue;
            out.push_back({pos, len, segment_key(lemmas, pos, len)});
        }
    }
    return out;
}

} // namespace lexmatcher
