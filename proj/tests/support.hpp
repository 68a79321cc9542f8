#pragma once

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/lexicon.hpp"
#include "lexmatcher/rng.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace lexmatcher::test {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lexmatcher_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& pairs,
                          std::string src_lang = "en", std::string tgt_lang = "de") {
    Corpus corpus;
    corpus.source_lang = std::move(src_lang);
    corpus.target_lang = std::move(tgt_lang);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        corpus.pairs.push_back({i, pairs[i].first, pairs[i].second, std::nullopt});
    }
    return corpus;
}

/// Randomized corpus+lexicon fixture for oracle-equivalence testing. Source
/// vocabulary w0..w{V-1} translates to t0..t{V-1}; the lexicon mixes correct
/// unigrams, bigrams, spurious pairs that fail the target-side test, and a
/// few multi-token entity entries. Sentences translate token-for-token with
/// dropout so the target-side condition actually bites.
struct RandomFixture {
    Corpus corpus;
    Lexicon lexicon{8};
    PairResources res;
};

inline RandomFixture make_random_fixture(std::uint64_t seed, std::size_t n_pairs,
                                         std::size_t vocab, std::size_t n_senses,
                                         bool with_scores) {
    DeterministicRng rng(seed);
    RandomFixture fixture;
    fixture.res.source = LangResources::for_language("xx"); // identity lemmas
    fixture.res.target = LangResources::for_language("yy");
    fixture.res.source.stopwords.insert("w0");
    fixture.res.source.stopwords.insert("w1");

    auto sw = [&](std::size_t i) { return "w" + std::to_string(i); };
    auto tw = [&](std::size_t i) { return "t" + std::to_string(i); };

    for (std::size_t s = 0; s < n_senses; ++s) {
        SensePair entry;
        entry.sense_id = "s" + std::to_string(s);
        entry.has_pos = true;
        entry.pos = s % 3 == 0 ? Pos::Noun : (s % 3 == 1 ? Pos::Verb : Pos::Adj);
        std::size_t a = rng.next_below(vocab);
        switch (rng.next_below(5)) {
        case 0: { // correct bigram
            std::size_t b = rng.next_below(vocab);
            entry.source_segment = {sw(a), sw(b)};
            entry.target_segment = {tw(a), tw(b)};
            break;
        }
        case 1: // spurious target (often absent)
            entry.source_segment = {sw(a)};
            entry.target_segment = {tw(rng.next_below(vocab))};
            break;
        case 2: { // entity-style trigram
            std::size_t b = rng.next_below(vocab), c = rng.next_below(vocab);
            entry.source_segment = {sw(a), sw(b), sw(c)};
            entry.target_segment = {tw(a), tw(b), tw(c)};
            entry.origin = SenseOrigin::Entity;
            entry.has_pos = false;
            break;
        }
        default: // correct unigram (two cases: duplicate-source senses appear)
            entry.source_segment = {sw(a)};
            entry.target_segment = {tw(a)};
            break;
        }
        fixture.lexicon.add(std::move(entry));
    }

    for (std::size_t i = 0; i < n_pairs; ++i) {
        std::size_t len = 3 + rng.next_below(9);
        std::vector<std::size_t> ids;
        std::string src, tgt;
        for (std::size_t j = 0; j < len; ++j) {
            std::size_t id = rng.next_below(vocab);
            ids.push_back(id);
            if (j) src += ' ';
            src += sw(id);
        }
        bool first = true;
        for (std::size_t id : ids) {
            if (rng.next_below(10) == 0) continue; // translation dropout
            if (!first) tgt += ' ';
            first = false;
            tgt += tw(id);
        }
        if (tgt.empty()) tgt = tw(ids[0]);
        SentencePair pair{i, std::move(src), std::move(tgt), std::nullopt};
        if (with_scores) {
            // Coarse grid keeps plenty of ties for the stable-sort contract.
            pair.quality_score = static_cast<double>(rng.next_below(21)) / 20.0;
        }
        fixture.corpus.pairs.push_back(std::move(pair));
    }
    fixture.corpus.source_lang = "xx";
    fixture.corpus.target_lang = "yy";
    return fixture;
}

} // namespace lexmatcher::test
