#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lexmatcher/error.hpp"
#include "lexmatcher/matcher.hpp"

#include "oracle.hpp"
#include "support.hpp"

using namespace lexmatcher;
using namespace lexmatcher::test;

namespace {

Lexicon tiny_lexicon(PairResources& res) {
    res.source = LangResources::for_language("en");
    res.target = LangResources::for_language("de");
    res.source.stopwords.insert("the");
    Lexicon lexicon(8);
    SensePair bank{{"bank"}, {"ufer"}, Pos::Noun, true, "bank.n.01", "river bank", SenseOrigin::Dictionary};
    SensePair bank2{{"bank"}, {"geldinstitut"}, Pos::Noun, true, "bank.n.02", "money bank", SenseOrigin::Dictionary};
    lexicon.add(bank);
    lexicon.add(bank2);
    return lexicon;
}

} // namespace

TEST_CASE("rank_corpus orders by score descending with index tie-break") {
    Corpus corpus = make_corpus({{"a", "x"}, {"b", "y"}, {"c", "z"}});
    corpus.pairs[0].quality_score = 0.2;
    corpus.pairs[1].quality_score = 0.9;
    corpus.pairs[2].quality_score = 0.9;
    Corpus ranked = rank_corpus(corpus);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked.pairs[0].index == 1);
    CHECK(ranked.pairs[1].index == 2);
    CHECK(ranked.pairs[2].index == 0);
}

TEST_CASE("rank_corpus keeps original order for equal or missing scores") {
    Corpus corpus = make_corpus({{"a", "x"}, {"b", "y"}, {"c", "z"}});
    SUBCASE("all equal") {
        for (auto& pair : corpus.pairs) pair.quality_score = 0.5;
        Corpus ranked = rank_corpus(corpus);
        for (std::size_t i = 0; i < 3; ++i) CHECK(ranked.pairs[i].index == i);
    }
    SUBCASE("no scores at all") {
        Corpus ranked = rank_corpus(corpus);
        for (std::size_t i = 0; i < 3; ++i) CHECK(ranked.pairs[i].index == i);
    }
    SUBCASE("unscored pairs sort last") {
        corpus.pairs[2].quality_score = 0.1;
        Corpus ranked = rank_corpus(corpus);
        CHECK(ranked.pairs[0].index == 2);
        CHECK(ranked.pairs[1].index == 0);
        CHECK(ranked.pairs[2].index == 1);
    }
}

TEST_CASE("match_sentence counts and caps per sense") {
    PairResources res;
    Lexicon lexicon = tiny_lexicon(res);
    CountTable table(lexicon.size(), 1);
    SentencePair pair{0, "the bank is steep", "das ufer ist steil", std::nullopt};

    MatchRecord first = match_sentence(pair, lexicon, table, res);
    CHECK(first.selected);
    REQUIRE(first.matched.size() == 1);
    CHECK(first.matched[0].sense == 0);
    CHECK(first.matched[0].position == 1);
    CHECK(table.count(0) == 1);

    // same sentence replayed at the cap: not selected, count unchanged
    MatchRecord second = match_sentence(pair, lexicon, table, res);
    CHECK_FALSE(second.selected);
    CHECK(second.matched.empty());
    CHECK(table.count(0) == 1);
}

TEST_CASE("match_sentence requires the target-side segment") {
    PairResources res;
    Lexicon lexicon = tiny_lexicon(res);
    CountTable table(lexicon.size(), 3);
    SentencePair pair{0, "the bank is steep", "kein treffer hier", std::nullopt};
    MatchRecord record = match_sentence(pair, lexicon, table, res);
    CHECK_FALSE(record.selected);
    CHECK(table.total_increments() == 0);
}

TEST_CASE("earlier duplicate occurrences can exhaust a sense within one sentence") {
    PairResources res;
    Lexicon lexicon = tiny_lexicon(res);
    CountTable table(lexicon.size(), 2);
    SentencePair pair{0, "bank to bank", "ufer zu ufer", std::nullopt};
    MatchRecord record = match_sentence(pair, lexicon, table, res);
    // two occurrences, K=2: both increment
    CHECK(record.matched.size() == 2);
    CHECK(table.count(0) == 2);

    CountTable capped(lexicon.size(), 1);
    MatchRecord one = match_sentence(pair, lexicon, capped, res);
    CHECK(one.matched.size() == 1); // second occurrence finds the cap reached
    CHECK(one.matched[0].position == 0);
}

TEST_CASE("retrieve with k=0 selects nothing") {
    PairResources res;
    Lexicon lexicon = tiny_lexicon(res);
    Corpus corpus = make_corpus({{"the bank", "das ufer"}});
    RetrieveResult result = retrieve(corpus, lexicon, 0, res);
    CHECK(result.subset.empty());
    CHECK(result.coverage.covered.empty());
    CHECK(result.coverage.uncovered.size() == 2);
}

TEST_CASE("retrieve with an empty lexicon selects nothing") {
    PairResources res;
    res.source = LangResources::for_language("en");
    res.target = LangResources::for_language("de");
    Lexicon lexicon(8);
    Corpus corpus = make_corpus({{"the bank", "das ufer"}});
    RetrieveResult result = retrieve(corpus, lexicon, 3, res);
    CHECK(result.subset.empty());
    CHECK(result.coverage.covered.empty());
    CHECK(result.coverage.uncovered.empty());
}

TEST_CASE("retrieve rejects negative k") {
    PairResources res;
    Lexicon lexicon = tiny_lexicon(res);
    Corpus corpus = make_corpus({{"a", "b"}});
    CHECK_THROWS_AS(retrieve(corpus, lexicon, -1, res), ConfigError);
}

namespace {

void check_against_oracle(const RandomFixture& fixture, int k) {
    RetrieveResult result = retrieve(fixture.corpus, fixture.lexicon, k, fixture.res);
    OracleResult expected =
        oracle_retrieve(fixture.corpus, fixture.lexicon.entries(), k, fixture.res);

    REQUIRE(result.subset.size() == expected.selected.size());
    for (std::size_t i = 0; i < expected.selected.size(); ++i) {
        CHECK(result.subset.pairs[i].index == expected.selected[i]);
    }
    REQUIRE(result.coverage.counts.size() == expected.counts.size());
    CHECK(result.coverage.counts == expected.counts);

    REQUIRE(result.records.size() == expected.records.size());
    for (std::size_t i = 0; i < expected.records.size(); ++i) {
        const MatchRecord& got = result.records[i];
        const OracleRecord& want = expected.records[i];
        CHECK(got.pair_index == want.pair_index);
        REQUIRE(got.matched.size() == want.matched.size());
        for (std::size_t j = 0; j < want.matched.size(); ++j) {
            CHECK(got.matched[j].sense == want.matched[j].sense);
            CHECK(got.matched[j].position == want.matched[j].position);
            CHECK(got.matched[j].length == want.matched[j].length);
        }
    }
}

} // namespace

TEST_CASE("retrieve matches the brute-force transliteration exactly") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (int k : {0, 1, 2, 3}) {
            RandomFixture fixture = make_random_fixture(seed, 1000, 30, 120, seed != 3);
            check_against_oracle(fixture, k);
        }
    }
}

TEST_CASE("retrieve is thread-count independent") {
    RandomFixture fixture = make_random_fixture(21, 9000, 50, 150, true);
    RetrieveOptions seq;
    seq.threads = 1;
    RetrieveOptions par;
    par.threads = 8;
    RetrieveResult a = retrieve(fixture.corpus, fixture.lexicon, 2, fixture.res, seq);
    RetrieveResult b = retrieve(fixture.corpus, fixture.lexicon, 2, fixture.res, par);
    REQUIRE(a.subset.size() == b.subset.size());
    for (std::size_t i = 0; i < a.subset.size(); ++i) {
        CHECK(a.subset.pairs[i].index == b.subset.pairs[i].index);
    }
    CHECK(a.coverage.counts == b.coverage.counts);
}

TEST_CASE("coverage invariants hold after retrieval") {
    RandomFixture fixture = make_random_fixture(8, 800, 25, 100, true);
    const int k = 2;
    RetrieveResult result = retrieve(fixture.corpus, fixture.lexicon, k, fixture.res);

    CHECK(result.coverage.covered.size() + result.coverage.uncovered.size() ==
          fixture.lexicon.size());

    // counts never exceed k; histogram weights add up to the lexicon size
    std::uint64_t hist_total = 0;
    for (const auto& [count, senses] : result.coverage.histogram) {
        CHECK(count <= static_cast<std::uint32_t>(k));
        hist_total += senses;
    }
    CHECK(hist_total == fixture.lexicon.size());

    // every selected pair incremented at least one sense
    for (const MatchRecord& record : result.records) {
        CHECK(record.selected);
        CHECK_FALSE(record.matched.empty());
    }

    // every sense that occurs in some pair (source and target) is covered
    OracleResult oracle_all =
        oracle_retrieve(fixture.corpus, fixture.lexicon.entries(), 1000000, fixture.res);
    for (std::size_t s = 0; s < fixture.lexicon.size(); ++s) {
        if (oracle_all.counts[s] > 0) {
            CHECK(result.coverage.counts[s] >= 1);
        }
    }
}

TEST_CASE("coverage_gaps keeps uncovered polysemous nouns and verbs only") {
    PairResources res;
    res.source = LangResources::for_language("en");
    res.target = LangResources::for_language("de");
    Lexicon lexicon(8);
    // four senses of noun "bank": uncovered ones qualify
    for (int i = 1; i <= 4; ++i) {
        lexicon.add({{"bank"}, {"t" + std::to_string(i)}, Pos::Noun, true,
                     "bank.n.0" + std::to_string(i), "", SenseOrigin::Dictionary});
    }
    // exactly three senses of noun "set": excluded (strictly more than three)
    for (int i = 1; i <= 3; ++i) {
        lexicon.add({{"set"}, {"s" + std::to_string(i)}, Pos::Noun, true,
                     "set.n.0" + std::to_string(i), "", SenseOrigin::Dictionary});
    }
    // entity entry: excluded (no POS)
    lexicon.add({{"acme", "corp"}, {"acme"}, Pos::Other, false, "ent.000000", "",
                 SenseOrigin::Entity});

    // bank.n.01 covered, everything else uncovered
    Corpus corpus = make_corpus({{"the bank", "t1"}});
    res.source.stopwords.insert("the");
    RetrieveResult result = retrieve(corpus, lexicon, 1, res);
    std::vector<const SensePair*> gaps = coverage_gaps(result.coverage, lexicon);

    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0]->sense_id == "bank.n.02");
    CHECK(gaps[1]->sense_id == "bank.n.03");
    CHECK(gaps[2]->sense_id == "bank.n.04");
}

TEST_CASE("matches jsonl round-trips the fields build-sft needs") {
    PairResources res;
    Lexicon lexicon = tiny_lexicon(res);
    Corpus corpus = make_corpus({{"the Banks were steep", "die Ufer waren steil"}});
    RetrieveResult result = retrieve(corpus, lexicon, 1, res);
    REQUIRE(result.subset.size() == 1);

    TempDir dir("matches");
    write_matches_jsonl(dir.file("m.jsonl"), result, lexicon, res);
    std::vector<LoadedMatchRecord> loaded = read_matches_jsonl(dir.file("m.jsonl"));
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].matched.size() == 1);
    CHECK(loaded[0].matched[0].sense_id == "bank.n.01");
    CHECK(loaded[0].matched[0].surface == "Banks"); // surface form, not lemma
    CHECK(loaded[0].matched[0].target_surface == "ufer");
    CHECK(loaded[0].matched[0].position == 1);
}
