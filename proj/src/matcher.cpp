#include "lexmatcher/matcher.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace lexmatcher {

std::uint64_t CountTable::total_increments() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

namespace {

std::vector<std::size_t> ranked_order(const Corpus& corpus) {
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = corpus.pairs[a];
        const auto& pb = corpus.pairs[b];
        if (pa.quality_score.has_value() != pb.quality_score.has_value()) {
            return pa.quality_score.has_value();
        }
        if (pa.quality_score && pb.quality_score && *pa.quality_score != *pb.quality_score) {
            return *pa.quality_score > *pb.quality_score;
        }
        return pa.index < pb.index;
    });
    return order;
}

} // namespace

Corpus rank_corpus(const Corpus& corpus) {
    Corpus ranked;
    ranked.source_lang = corpus.source_lang;
    ranked.target_lang = corpus.target_lang;
    ranked.pairs.reserve(corpus.size());
    for (std::size_t i : ranked_order(corpus)) ranked.pairs.push_back(corpus.pairs[i]);
    return ranked;
}

namespace {

// Token positions of each lemma in the target sentence, for fast containment.
struct TargetIndex {
    const std::vector<std::string>* lemmas = nullptr;
    std::unordered_map<std::string_view, std::vector<std::uint32_t>> positions;

    void build(const std::vector<std::string>& lems) {
        lemmas = &lems;
        positions.clear();
        for (std::uint32_t i = 0; i < lems.size(); ++i) {
            positions[lems[i]].push_back(i);
        }
    }

    bool contains(const std::vector<std::string>& segment) const {
        auto it = positions.find(segment.front());
        if (it == positions.end()) return false;
        if (segment.size() == 1) return true;
        for (std::uint32_t start : it->second) {
            if (start + segment.size() > lemmas->size()) break;
            bool match = true;
            for (std::size_t j = 1; j < segment.size(); ++j) {
                if ((*lemmas)[start + j] != segment[j]) {
                    match = false;
                    break;
                }
            }
            if (match) return true;
        }
        return false;
    }
};

struct PreparedPair {
    std::vector<std::string> source_lemmas;
    std::vector<std::string> target_lemmas;
};

PreparedPair prepare_pair(const SentencePair& pair, const PairResources& res,
                          const RetrieveOptions& options) {
    PreparedPair prep;
    if (options.source_lemmas && pair.index < options.source_lemmas->size()) {
        prep.source_lemmas = (*options.source_lemmas)[pair.index];
    } else {
        prep.source_lemmas =
            res.source.lemmatizer.lemmatize_all(res.source.tokenizer.tokenize(pair.source_text));
    }
    if (options.target_lemmas && pair.index < options.target_lemmas->size()) {
        prep.target_lemmas = (*options.target_lemmas)[pair.index];
    } else {
        prep.target_lemmas =
            res.target.lemmatizer.lemmatize_all(res.target.tokenizer.tokenize(pair.target_text));
    }
    return prep;
}

MatchRecord match_prepared(const SentencePair& pair, const PreparedPair& prep,
                           const Lexicon& lexicon, CountTable& table,
                           const PairResources& res) {
    MatchRecord record;
    record.pair_index = pair.index;
    if (lexicon.size() == 0) return record;

    TargetIndex target;
    target.build(prep.target_lemmas);

    const std::size_t max_len = std::max<std::size_t>(2, lexicon.max_source_len());
    for (const CandidateSegment& cand :
         candidate_segments(prep.source_lemmas, res.source.stopwords, max_len)) {
        for (std::uint32_t sense : lexicon.lookup_ids(cand.key)) {
            // The cap check precedes the target test; a capped sense never
            // selects a sentence, and increments apply immediately so an
            // earlier occurrence can exhaust the budget within this sentence.
            if (!table.below_cap(sense)) continue;
            if (!target.contains(lexicon.entries()[sense].target_segment)) continue;
            table.increment(sense);
            record.matched.push_back({sense, static_cast<std::uint32_t>(cand.position),
                                      static_cast<std::uint32_t>(cand.length)});
        }
    }
    record.selected = !record.matched.empty();
    return record;
}

CoverageReport build_coverage(const CountTable& table, const Lexicon& lexicon,
                              std::uint64_t subset_size) {
    CoverageReport report;
    report.k = table.k();
    report.subset_size = subset_size;
    report.counts = table.counts();
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
        const std::string& id = lexicon.entries()[i].sense_id;
        std::uint32_t c = table.count(static_cast<std::uint32_t>(i));
        (c > 0 ? report.covered : report.uncovered).push_back(id);
        ++report.histogram[c];
    }
    return report;
}

} // namespace

MatchRecord match_sentence(const SentencePair& pair, const Lexicon& lexicon, CountTable& table,
                           const PairResources& res) {
    return match_prepared(pair, prepare_pair(pair, res, {}), lexicon, table, res);
}

RetrieveResult retrieve(const Corpus& corpus, const Lexicon& lexicon, int k,
                        const PairResources& res, const RetrieveOptions& options) {
    if (k < 0) throw ConfigError("retrieval threshold k must be >= 0, got " + std::to_string(k));

    Corpus ranked = options.rank ? rank_corpus(corpus) : corpus;

    RetrieveResult result;
    result.subset.source_lang = corpus.source_lang;
    result.subset.target_lang = corpus.target_lang;
    CountTable table(lexicon.size(), k);

    // Lemmatization and tokenization are pure, so blocks are prepared in
    // parallel ahead of the strictly sequential count/select fold.
    const std::size_t block = 8192;
    std::vector<PreparedPair> prepared;
    for (std::size_t base = 0; base < ranked.size(); base += block) {
        const std::size_t end = std::min(ranked.size(), base + block);
        prepared.assign(end - base, {});
        parallel_chunks(end - base, options.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                prepared[i] = prepare_pair(ranked.pairs[base + i], res, options);
            }
        });
        for (std::size_t i = 0; i < end - base; ++i) {
            MatchRecord record =
                match_prepared(ranked.pairs[base + i], prepared[i], lexicon, table, res);
            if (record.selected) {
                result.subset.pairs.push_back(ranked.pairs[base + i]);
                result.records.push_back(std::move(record));
            }
        }
    }

    result.coverage = build_coverage(table, lexicon, result.subset.size());
    return result;
}

std::vector<const SensePair*> coverage_gaps(const CoverageReport& report, const Lexicon& lexicon) {
    // Distinct sense ids per (source segment, pos) group across the lexicon.
    std::unordered_map<std::string, std::size_t> group_sizes;
    for (const SensePair& entry : lexicon.entries()) {
        if (!entry.has_pos) continue;
        std::string key = entry.source_key();
        key.push_back('\x1f');
        key += pos_name(entry.pos);
        ++group_sizes[key];
    }

    std::unordered_map<std::string_view, std::uint32_t> id_to_index;
    for (std::uint32_t i = 0; i < lexicon.size(); ++i) {
        id_to_index.emplace(lexicon.entries()[i].sense_id, i);
    }

    std::vector<const SensePair*> gaps;
    for (const std::string& id : report.uncovered) {
        auto it = id_to_index.find(id);
        if (it == id_to_index.end()) continue;
        const SensePair& entry = lexicon.entries()[it->second];
        if (!entry.has_pos || (entry.pos != Pos::Noun && entry.pos != Pos::Verb)) continue;
        std::string key = entry.source_key();
        key.push_back('\x1f');
        key += pos_name(entry.pos);
        if (group_sizes[key] <= 3) continue; // strictly more than three senses
        gaps.push_back(&entry);
    }
    std::sort(gaps.begin(), gaps.end(), [](const SensePair* a, const SensePair* b) {
        if (a->source_segment != b->source_segment) return a->source_segment < b->source_segment;
        return a->sense_id < b->sense_id;
    });
    return gaps;
}

std::string CoverageReport::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["subset_size"] = subset_size;
    j["lexicon_size"] = covered.size() + uncovered.size();
    j["covered_count"] = covered.size();
    j["uncovered_count"] = uncovered.size();
    nlohmann::ordered_json hist;
    for (const auto& [count, senses] : histogram) hist[std::to_string(count)] = senses;
    j["histogram"] = hist;
    j["covered"] = covered;
    j["uncovered"] = uncovered;
    j["counts"] = counts;
    return j.dump(2);
}

CoverageReport CoverageReport::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CoverageReport report;
    report.k = j.at("k").get<int>();
    report.subset_size = j.at("subset_size").get<std::uint64_t>();
    report.covered = j.at("covered").get<std::vector<std::string>>();
    report.uncovered = j.at("uncovered").get<std::vector<std::string>>();
    report.counts = j.at("counts").get<std::vector<std::uint32_t>>();
    for (const auto& [key, value] : j.at("histogram").items()) {
        report.histogram[static_cast<std::uint32_t>(std::stoul(key))] =
            value.get<std::uint64_t>();
    }
    return report;
}

void write_matches_jsonl(const std::filesystem::path& path, const RetrieveResult& result,
                         const Lexicon& lexicon, const PairResources& res) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const MatchRecord& record = result.records[i];
        const SentencePair& pair = result.subset.pairs[i];
        std::vector<std::string> tokens = res.source.tokenizer.tokenize(pair.source_text);
        nlohmann::ordered_json j;
        j["pair_index"] = record.pair_index;
        nlohmann::ordered_json matched = nlohmann::ordered_json::array();
        for (const SenseMatch& m : record.matched) {
            const SensePair& sense = lexicon.entries()[m.sense];
            nlohmann::ordered_json entry;
            entry["sense_id"] = sense.sense_id;
            entry["source_segment"] = sense.source_key();
            entry["target_segment"] = sense.target_key();
            entry["position"] = m.position;
            entry["length"] = m.length;
            entry["surface"] = res.source.tokenizer.join(tokens, m.position, m.length);
            entry["target_surface"] = res.target.tokenizer.join(sense.target_segment);
            matched.push_back(std::move(entry));
        }
        j["matched"] = std::move(matched);
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<LoadedMatchRecord> read_matches_jsonl(const std::filesystem::path& path) {
    std::vector<LoadedMatchRecord> records;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string(), line_no, e.what());
        }
        LoadedMatchRecord record;
        record.pair_index = j.at("pair_index").get<std::uint64_t>();
        for (const auto& entry : j.at("matched")) {
            MatchedSegment seg;
            seg.sense_id = entry.at("sense_id").get<std::string>();
            seg.source_segment = entry.at("source_segment").get<std::string>();
            seg.target_segment = entry.at("target_segment").get<std::string>();
            seg.position = entry.at("position").get<std::uint32_t>();
            seg.length = entry.at("length").get<std::uint32_t>();
            seg.surface = entry.at("surface").get<std::string>();
            seg.target_surface = entry.value("target_surface", seg.target_segment);
            record.matched.push_back(std::move(seg));
        }
        records.push_back(std::move(record));
    }
    return records;
}

} // namespace lexmatcher
